#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ieim {

/// One sensor firing: timestamp in integer ticks, pixel coordinates,
/// polarity (+1 brightening, -1 darkening).
struct Event {
  std::uint64_t t = 0;
  std::uint16_t x = 0;
  std::uint16_t y = 0;
  std::int8_t polarity = 1;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Canonical event order: time ascending, ties broken by (y, x) ascending,
/// then polarity with +1 before -1. This is a total order on valid streams
/// (no two events may share pixel and tick), so sorting is reproducible.
inline bool canonical_less(const Event& a, const Event& b) {
  if (a.t != b.t) return a.t < b.t;
  if (a.y != b.y) return a.y < b.y;
  if (a.x != b.x) return a.x < b.x;
  return a.polarity > b.polarity;
}

/// Time-sorted event sequence plus sensor geometry and tick resolution.
struct EventStream {
  std::uint16_t width = 0;
  std::uint16_t height = 0;
  std::uint32_t tick_ns = 1000;  // duration of one timestamp unit
  std::vector<Event> events;

  double tick_seconds() const { return tick_ns * 1e-9; }
  double duration_seconds() const {
    return events.empty() ? 0.0 : (events.back().t + 1) * tick_seconds();
  }
};

/// Dense row-major 2-D grid of doubles.
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Grid() = default;
  Grid(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
  std::size_t size() const { return data.size(); }
};

/// Ground-truth fluorophore density D(x,y); one grid per modulation cycle
/// (a single grid means a static scene).
struct FluoroField {
  int width = 0;
  int height = 0;
  std::vector<Grid> frames;

  const Grid& frame_for_cycle(int cycle) const {
    return frames.size() == 1 ? frames.front() : frames[static_cast<std::size_t>(cycle)];
  }
};

/// Pulsed illumination: period, duty fraction, peak amplitude, and the
/// linear rise/fall ramps that realize the finite slew of the optical chain.
struct ModulationSchedule {
  double period_s = 0;
  double duty = 0.5;
  double amplitude = 0;
  double rise_s = 0;
  double fall_s = 0;
  int cycles = 1;

  double on_seconds() const { return duty * period_s; }
  double total_seconds() const { return cycles * period_s; }
  /// Ramp rate of the rising edge.
  double ramp_rate() const { return amplitude / rise_s; }
};

/// Fluorescence efficiency and the combined contrast threshold. Only the
/// product theta*C_p is observable, carried here as c_thr.
struct PhotometricModel {
  double gain_k = 1.0;
  double c_thr = 0.01;
};

/// Sensor non-idealities for the simulator.
struct SensorConfig {
  std::int64_t refractory_ticks = 1;
  double threshold_sigma = 0;   // per-pixel lognormal jitter on c_thr
  double noise_rate_hz = 0;     // background Poisson rate per pixel
  std::uint64_t rng_seed = 0;
};

enum class Confidence : std::uint8_t { Empty = 0, SingleEvent = 1, Measured = 2 };

/// Reconstructed density estimates, one frame per modulation cycle, with a
/// per-pixel confidence flag. Estimate is zero wherever the flag is Empty.
struct FrameSequence {
  int width = 0;
  int height = 0;
  std::vector<Grid> frames;
  std::vector<std::vector<std::uint8_t>> confidence;
};

struct Violation {
  std::size_t index = 0;
  std::string message;
};

/// Checks all EventStream invariants; returns one record per failure.
/// Violations are data, not errors.
std::vector<Violation> validate_stream(const EventStream& stream);

/// Events with t_begin <= t < t_end, order preserved, header copied.
/// Throws std::invalid_argument on reversed bounds.
EventStream window(const EventStream& stream, std::uint64_t t_begin, std::uint64_t t_end);

/// Sorts events into canonical order in place.
void canonical_sort(std::vector<Event>& events);

}  // namespace ieim
