#include "ieim/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include "ieim/errors.hpp"
#include "ieim/rng.hpp"
#include "ieim/threads.hpp"

namespace ieim {

namespace {

constexpr double kMaxTotalEvents = 1e9;

struct TimedPol {
  double t;
  std::int8_t pol;
};

void check_schedule(const ModulationSchedule& s) {
  if (!(s.period_s > 0)) throw std::invalid_argument("schedule: period must be > 0");
  if (!(s.duty > 0) || s.duty > 1) throw std::invalid_argument("schedule: duty must be in (0,1]");
  if (!(s.rise_s > 0) || !(s.fall_s > 0))
    throw std::invalid_argument("schedule: rise and fall must be > 0");
  if (s.rise_s + s.fall_s > s.duty * s.period_s * (1 + 1e-12))
    throw std::invalid_argument("schedule: rise + fall exceed the on phase");
  if (!(s.amplitude > 0)) throw std::invalid_argument("schedule: amplitude must be > 0");
  if (s.cycles < 1) throw std::invalid_argument("schedule: cycles must be >= 1");
}

void check_photometric(const PhotometricModel& p) {
  if (!(p.gain_k > 0) || !(p.c_thr > 0))
    throw std::invalid_argument("photometric: K and c_thr must be > 0");
}

void check_sensor(const SensorConfig& s) {
  if (s.refractory_ticks < 0 || s.threshold_sigma < 0 || s.noise_rate_hz < 0)
    throw std::invalid_argument("sensor: negative parameter");
}

void check_field(const FluoroField& field, int cycles) {
  if (field.width <= 0 || field.height <= 0 || field.frames.empty())
    throw std::invalid_argument("field: empty");
  if (field.frames.size() != 1 && field.frames.size() != static_cast<std::size_t>(cycles))
    throw std::invalid_argument("field: frame count must be 1 or n_cycles");
  for (const Grid& f : field.frames) {
    if (f.width != field.width || f.height != field.height)
      throw std::invalid_argument("field: frame dimensions differ");
    for (double v : f.data)
      if (!std::isfinite(v) || v < 0) throw std::invalid_argument("field: density must be finite and >= 0");
  }
}

/// Appends rise crossings (times measured from t0) and returns the level m
/// of the last crossing, 0 if none fired.
double append_rise(double g, double peak_m, double expc, double em1, double t0,
                   std::vector<TimedPol>& out) {
  double last = 0.0;
  for (double m = em1; m <= peak_m; m = m * expc + em1) {
    out.push_back({t0 + m / g, +1});
    last = m;
  }
  return last;
}

double threshold_for_pixel(const PhotometricModel& photo, const SensorConfig& sensor,
                           std::uint32_t x, std::uint32_t y) {
  if (sensor.threshold_sigma <= 0) return photo.c_thr;
  SplitMix64 rng = pixel_rng(sensor.rng_seed, x, y, 1);
  return photo.c_thr * std::exp(sensor.threshold_sigma * rng.next_normal());
}

void append_noise(const SensorConfig& sensor, double total_s, std::uint32_t x,
                  std::uint32_t y, std::vector<TimedPol>& out) {
  if (sensor.noise_rate_hz <= 0) return;
  SplitMix64 rng = pixel_rng(sensor.rng_seed, x, y, 2);
  double t = rng.next_exponential() / sensor.noise_rate_hz;
  while (t < total_s) {
    out.push_back({t, static_cast<std::int8_t>(rng.next_bool() ? +1 : -1)});
    t += rng.next_exponential() / sensor.noise_rate_hz;
  }
}

/// Tick quantization plus the refractory rule. Two crossings in one tick
/// collapse to the earlier one even with refractory 0, which keeps
/// per-pixel timestamps strictly increasing.
void quantize_filter(const std::vector<TimedPol>& instants, double tick_s,
                     std::int64_t refractory, std::uint16_t x, std::uint16_t y,
                     std::vector<Event>& out) {
  const std::int64_t gap = std::max<std::int64_t>(1, refractory);
  std::int64_t last = std::numeric_limits<std::int64_t>::min() / 2;
  bool first = true;
  for (const TimedPol& tp : instants) {
    std::int64_t tick = std::llround(tp.t / tick_s);
    if (tick < 0) tick = 0;
    if (!first && tick < last + gap) continue;
    out.push_back(Event{static_cast<std::uint64_t>(tick), x, y, tp.pol});
    last = tick;
    first = false;
  }
}

struct PulseContext {
  const FluoroField* field;
  ModulationSchedule sched;
  PhotometricModel photo;
  SensorConfig sensor;
  double tick_s;
  double expc_base;  // unused when jitter active; kept for the common path
  std::atomic<bool>* overflow;
};

void simulate_pulse_pixel(const PulseContext& ctx, std::uint16_t x, std::uint16_t y,
                          std::vector<TimedPol>& scratch, std::vector<Event>& out) {
  const ModulationSchedule& sched = ctx.sched;
  const double c_eff = threshold_for_pixel(ctx.photo, ctx.sensor, x, y);
  const double expc = std::exp(c_eff);
  const double em1 = std::expm1(c_eff);
  const double emc = std::exp(-c_eff);
  const double em1m = -std::expm1(-c_eff);
  const double duty_s = sched.on_seconds();
  const double total_s = sched.total_seconds();
  const double ramp_rate = sched.ramp_rate();

  scratch.clear();
  for (int cycle = 0; cycle < sched.cycles; ++cycle) {
    const double density = ctx.field->frame_for_cycle(cycle).at(x, y);
    if (density <= 0) continue;
    const double g = ramp_rate * ctx.photo.gain_k * density;
    const double peak_m = g * sched.rise_s;

    // Bail out before allocating absurd amounts; the caller turns this
    // into a ResourceError after the parallel region.
    if (std::log1p(peak_m) / c_eff > 2e8) {
      ctx.overflow->store(true, std::memory_order_relaxed);
      return;
    }

    const double cycle_start = cycle * sched.period_s;
    const std::size_t before = scratch.size();
    const double last_m = append_rise(g, peak_m, expc, em1, cycle_start, scratch);
    const std::size_t n_rise = scratch.size() - before;

    // The fall mirrors the rise: same crossing count, levels stepping back
    // down to the cycle-start reference, so every cycle starts clean.
    const double fall_start = cycle_start + duty_s - sched.fall_s;
    double z = last_m;
    for (std::size_t j = 0; j < n_rise; ++j) {
      z = z * emc - em1m;
      if (z < 0) z = 0;
      scratch.push_back({fall_start + sched.fall_s * (1.0 - z / peak_m), -1});
    }
  }

  if (ctx.sensor.noise_rate_hz > 0) {
    std::vector<TimedPol> noise;
    append_noise(ctx.sensor, total_s, x, y, noise);
    if (!noise.empty()) {
      std::vector<TimedPol> merged(scratch.size() + noise.size());
      std::merge(scratch.begin(), scratch.end(), noise.begin(), noise.end(), merged.begin(),
                 [](const TimedPol& a, const TimedPol& b) { return a.t < b.t; });
      scratch.swap(merged);
    }
  }

  quantize_filter(scratch, ctx.tick_s, ctx.sensor.refractory_ticks, x, y, out);
}

EventStream assemble(std::uint16_t width, std::uint16_t height, std::uint32_t tick_ns,
                     std::vector<std::vector<Event>>& per_pixel) {
  EventStream s;
  s.width = width;
  s.height = height;
  s.tick_ns = tick_ns;
  std::size_t total = 0;
  for (const auto& v : per_pixel) total += v.size();
  s.events.reserve(total);
  for (auto& v : per_pixel) {
    s.events.insert(s.events.end(), v.begin(), v.end());
    v.clear();
    v.shrink_to_fit();
  }
  canonical_sort(s.events);
  return s;
}

template <typename PixelFn>
EventStream run_pixels(std::uint16_t width, std::uint16_t height, std::uint32_t tick_ns,
                       bool parallel, PixelFn&& fn) {
  const std::int64_t npix = static_cast<std::int64_t>(width) * height;
  std::vector<std::vector<Event>> per_pixel(static_cast<std::size_t>(npix));

  if (parallel) {
#pragma omp parallel num_threads(worker_count())
    {
      std::vector<TimedPol> scratch;
#pragma omp for schedule(dynamic, 64)
      for (std::int64_t p = 0; p < npix; ++p)
        fn(static_cast<std::uint16_t>(p % width), static_cast<std::uint16_t>(p / width),
           scratch, per_pixel[static_cast<std::size_t>(p)]);
    }
  } else {
    std::vector<TimedPol> scratch;
    for (std::int64_t p = 0; p < npix; ++p)
      fn(static_cast<std::uint16_t>(p % width), static_cast<std::uint16_t>(p / width),
         scratch, per_pixel[static_cast<std::size_t>(p)]);
  }
  return assemble(width, height, tick_ns, per_pixel);
}

EventStream simulate_pulse_impl(const FluoroField& field, const ModulationSchedule& sched,
                                const PhotometricModel& photo, const SensorConfig& sensor,
                                std::uint32_t tick_ns, bool parallel) {
  check_schedule(sched);
  check_photometric(photo);
  check_sensor(sensor);
  check_field(field, sched.cycles);
  if (tick_ns == 0) throw std::invalid_argument("tick_ns must be > 0");
  if (estimate_pulse_events(field, sched, photo, sensor) > kMaxTotalEvents)
    throw ResourceError("simulation would exceed 1e9 events");

  std::atomic<bool> overflow{false};
  PulseContext ctx{&field, sched, photo, sensor, tick_ns * 1e-9, 0.0, &overflow};

  EventStream s = run_pixels(static_cast<std::uint16_t>(field.width),
                             static_cast<std::uint16_t>(field.height), tick_ns, parallel,
                             [&ctx](std::uint16_t x, std::uint16_t y,
                                    std::vector<TimedPol>& scratch, std::vector<Event>& out) {
                               simulate_pulse_pixel(ctx, x, y, scratch, out);
                             });
  if (overflow.load()) throw ResourceError("per-pixel event budget exceeded");
  return s;
}

struct MotionContext {
  const std::vector<Grid>* frames;
  PhotometricModel photo;
  SensorConfig sensor;
  double frame_interval_s;
  double tick_s;
};

void simulate_motion_pixel(const MotionContext& ctx, std::uint16_t x, std::uint16_t y,
                           std::vector<TimedPol>& scratch, std::vector<Event>& out) {
  const std::vector<Grid>& frames = *ctx.frames;
  const double c_eff = threshold_for_pixel(ctx.photo, ctx.sensor, x, y);
  const double total_s = (frames.size() - 1) * ctx.frame_interval_s;

  scratch.clear();
  double ref = std::log1p(frames[0].at(x, y));
  double level_prev = ref;
  for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
    const double level_next = std::log1p(frames[i + 1].at(x, y));
    if (level_next != level_prev) {
      const double t0 = i * ctx.frame_interval_s;
      const double pol = level_next > level_prev ? 1.0 : -1.0;
      double cross = ref + pol * c_eff;
      while ((pol > 0 && cross > level_prev && cross <= level_next) ||
             (pol < 0 && cross < level_prev && cross >= level_next)) {
        const double frac = (cross - level_prev) / (level_next - level_prev);
        scratch.push_back({t0 + frac * ctx.frame_interval_s,
                           static_cast<std::int8_t>(pol > 0 ? +1 : -1)});
        ref = cross;
        cross += pol * c_eff;
      }
    }
    level_prev = level_next;
  }

  if (ctx.sensor.noise_rate_hz > 0) {
    std::vector<TimedPol> noise;
    append_noise(ctx.sensor, total_s, x, y, noise);
    if (!noise.empty()) {
      std::vector<TimedPol> merged(scratch.size() + noise.size());
      std::merge(scratch.begin(), scratch.end(), noise.begin(), noise.end(), merged.begin(),
                 [](const TimedPol& a, const TimedPol& b) { return a.t < b.t; });
      scratch.swap(merged);
    }
  }

  quantize_filter(scratch, ctx.tick_s, ctx.sensor.refractory_ticks, x, y, out);
}

EventStream simulate_motion_impl(const std::vector<Grid>& frames, double frame_interval_s,
                                 const PhotometricModel& photo, const SensorConfig& sensor,
                                 std::uint32_t tick_ns, bool parallel) {
  if (frames.size() < 2) throw std::invalid_argument("motion: need at least 2 frames");
  if (!(frame_interval_s > 0)) throw std::invalid_argument("motion: frame interval must be > 0");
  check_photometric(photo);
  check_sensor(sensor);
  const int w = frames[0].width, h = frames[0].height;
  if (w <= 0 || h <= 0) throw std::invalid_argument("motion: empty frames");
  for (const Grid& f : frames)
    if (f.width != w || f.height != h) throw std::invalid_argument("motion: frame shapes differ");
  if (tick_ns == 0) throw std::invalid_argument("tick_ns must be > 0");

  MotionContext ctx{&frames, photo, sensor, frame_interval_s, tick_ns * 1e-9};
  return run_pixels(static_cast<std::uint16_t>(w), static_cast<std::uint16_t>(h), tick_ns,
                    parallel,
                    [&ctx](std::uint16_t x, std::uint16_t y, std::vector<TimedPol>& scratch,
                           std::vector<Event>& out) {
                      simulate_motion_pixel(ctx, x, y, scratch, out);
                    });
}

}  // namespace

IlluminationProfile IlluminationProfile::from(const ModulationSchedule& sched) {
  check_schedule(sched);
  return IlluminationProfile{sched.period_s, sched.on_seconds(), sched.rise_s, sched.fall_s,
                             sched.amplitude};
}

double IlluminationProfile::value(double t) const {
  double u = std::fmod(t, period_s);
  if (u < 0) u += period_s;
  if (u < rise_s) return peak * (u / rise_s);
  if (u < duty_s - fall_s) return peak;
  if (u < duty_s) return peak * ((duty_s - u) / fall_s);
  return 0.0;
}

std::vector<double> ramp_crossing_instants(double density, double ramp_rate, double gain_k,
                                           double c_thr, double rise_s) {
  std::vector<double> out;
  if (density <= 0 || ramp_rate <= 0 || gain_k <= 0 || c_thr <= 0 || rise_s <= 0) return out;
  const double g = ramp_rate * gain_k * density;
  const double peak_m = g * rise_s;
  const double expc = std::exp(c_thr);
  const double em1 = std::expm1(c_thr);
  std::vector<TimedPol> tmp;
  append_rise(g, peak_m, expc, em1, 0.0, tmp);
  out.reserve(tmp.size());
  for (const TimedPol& tp : tmp) out.push_back(tp.t);
  return out;
}

double estimate_pulse_events(const FluoroField& field, const ModulationSchedule& sched,
                             const PhotometricModel& photo, const SensorConfig& sensor) {
  // Expected crossings per ramp: log1p(B*K*D)/c_thr, doubled for the fall.
  // Threshold jitter widens that by E[1/jitter] = exp(sigma^2 / 2).
  const double jitter_factor =
      sensor.threshold_sigma > 0 ? std::exp(sensor.threshold_sigma * sensor.threshold_sigma / 2)
                                 : 1.0;
  const double bk = sched.amplitude * photo.gain_k;
  double signal = 0;
  if (field.frames.size() == 1) {
    double per_cycle = 0;
    for (double d : field.frames[0].data) per_cycle += std::log1p(bk * d);
    signal = per_cycle * sched.cycles;
  } else {
    for (const Grid& f : field.frames)
      for (double d : f.data) signal += std::log1p(bk * d);
  }
  signal = signal / photo.c_thr * 2.0 * jitter_factor;
  const double noise = sensor.noise_rate_hz * sched.total_seconds() *
                       static_cast<double>(field.width) * field.height;
  return signal + noise;
}

EventStream simulate_pulse_stream(const FluoroField& field, const ModulationSchedule& sched,
                                  const PhotometricModel& photo, const SensorConfig& sensor,
                                  std::uint32_t tick_ns) {
  return simulate_pulse_impl(field, sched, photo, sensor, tick_ns, true);
}

EventStream simulate_pulse_stream_serial(const FluoroField& field,
                                         const ModulationSchedule& sched,
                                         const PhotometricModel& photo,
                                         const SensorConfig& sensor, std::uint32_t tick_ns) {
  return simulate_pulse_impl(field, sched, photo, sensor, tick_ns, false);
}

EventStream simulate_motion_stream(const std::vector<Grid>& frames, double frame_interval_s,
                                   const PhotometricModel& photo, const SensorConfig& sensor,
                                   std::uint32_t tick_ns) {
  return simulate_motion_impl(frames, frame_interval_s, photo, sensor, tick_ns, true);
}

EventStream simulate_motion_stream_serial(const std::vector<Grid>& frames,
                                          double frame_interval_s,
                                          const PhotometricModel& photo,
                                          const SensorConfig& sensor, std::uint32_t tick_ns) {
  return simulate_motion_impl(frames, frame_interval_s, photo, sensor, tick_ns, false);
}

std::vector<Grid> shake_sequence(const Grid& image, int amplitude_px, int n_frames) {
  if (amplitude_px < 1) throw std::invalid_argument("shake: amplitude must be >= 1");
  if (n_frames < 2) throw std::invalid_argument("shake: need at least 2 frames");

  std::vector<Grid> out;
  out.reserve(static_cast<std::size_t>(n_frames));
  const int period = 4 * amplitude_px;
  for (int i = 0; i < n_frames; ++i) {
    const int p = i % period;
    const int off = p <= 2 * amplitude_px
                        ? amplitude_px - std::abs(p - amplitude_px)
                        : -(amplitude_px - std::abs(p - 3 * amplitude_px));
    Grid g(image.width, image.height);
    for (int y = 0; y < image.height; ++y)
      for (int x = 0; x < image.width; ++x) {
        const int sx = std::clamp(x - off, 0, image.width - 1);
        g.at(x, y) = image.at(sx, y);
      }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace ieim
