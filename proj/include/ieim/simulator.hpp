#pragma once

#include <cstdint>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

/// Trapezoidal excitation profile within one period: linear 0->B over
/// rise_s, hold at B, linear B->0 over fall_s ending at duty*T, dark until T.
struct IlluminationProfile {
  double period_s = 0;
  double duty_s = 0;
  double rise_s = 0;
  double fall_s = 0;
  double peak = 0;

  static IlluminationProfile from(const ModulationSchedule& sched);

  /// Excitation intensity at absolute time t (period-T periodic).
  double value(double t) const;
};

/// Continuous-time threshold-crossing instants on the rising ramp for one
/// pixel, measured from ramp onset. g = ramp_rate * gain_k * density; the
/// k-th instant satisfies (1 + g*t_k) = (1 + g*t_{k-1}) * exp(c_thr) with
/// log(1 + g*t_0) = c_thr. Stops at the end of the ramp. This is the exact
/// path the pulse simulator emits from, exposed for verification.
std::vector<double> ramp_crossing_instants(double density, double ramp_rate,
                                           double gain_k, double c_thr,
                                           double rise_s);

/// Expected event count (signal crossings on both ramps plus background
/// noise) for the resource guard; cheap, runs before any allocation.
double estimate_pulse_events(const FluoroField& field, const ModulationSchedule& sched,
                             const PhotometricModel& photo, const SensorConfig& sensor);

/// Synthesizes the event stream a modulated-illumination recording would
/// produce from the given density field. One field frame is held constant
/// per cycle. Noise-free crossings follow ramp_crossing_instants exactly;
/// threshold jitter, Poisson background events, tick quantization and the
/// refractory rule are applied per pixel. Result is canonically sorted and
/// valid. OpenMP-parallel over pixels with a deterministic merge; the
/// _serial variant is the reference implementation and produces identical
/// bytes.
EventStream simulate_pulse_stream(const FluoroField& field, const ModulationSchedule& sched,
                                  const PhotometricModel& photo, const SensorConfig& sensor,
                                  std::uint32_t tick_ns = 1000);
EventStream simulate_pulse_stream_serial(const FluoroField& field,
                                         const ModulationSchedule& sched,
                                         const PhotometricModel& photo,
                                         const SensorConfig& sensor,
                                         std::uint32_t tick_ns = 1000);

/// Standard frame-to-event conversion for non-modulated recordings:
/// log(1 + intensity) is linearly interpolated between consecutive frames
/// and events fire at every +-c_thr crossing from the per-pixel reference.
EventStream simulate_motion_stream(const std::vector<Grid>& frames, double frame_interval_s,
                                   const PhotometricModel& photo, const SensorConfig& sensor,
                                   std::uint32_t tick_ns = 1000);
EventStream simulate_motion_stream_serial(const std::vector<Grid>& frames,
                                          double frame_interval_s,
                                          const PhotometricModel& photo,
                                          const SensorConfig& sensor,
                                          std::uint32_t tick_ns = 1000);

/// n_frames copies of image translated along a horizontal sawtooth path of
/// the given amplitude (offsets 0, 1, .., A, .., 0, -1, .., -A, ..), edge
/// pixels clamped.
std::vector<Grid> shake_sequence(const Grid& image, int amplitude_px, int n_frames);

}  // namespace ieim
