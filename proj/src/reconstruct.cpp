#include "ieim/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ieim/threads.hpp"

namespace ieim {

namespace {

void check_schedule_recon(const ModulationSchedule& s) {
  if (!(s.period_s > 0)) throw std::invalid_argument("schedule: period must be > 0");
  if (!(s.duty > 0) || s.duty > 1) throw std::invalid_argument("schedule: duty must be in (0,1]");
  if (!(s.rise_s > 0)) throw std::invalid_argument("schedule: rise must be > 0");
  if (!(s.amplitude > 0)) throw std::invalid_argument("schedule: amplitude must be > 0");
  if (s.cycles < 1) throw std::invalid_argument("schedule: cycles must be >= 1");
}

/// Positive-event timestamps grouped by pixel, preserving time order.
struct PixelIndex {
  std::vector<std::size_t> offsets;  // npix + 1
  std::vector<std::uint64_t> ticks;
  std::uint64_t trailing = 0;
};

PixelIndex group_positives(const EventStream& stream, double tick_s, double horizon_s) {
  const std::size_t npix = static_cast<std::size_t>(stream.width) * stream.height;
  PixelIndex idx;
  idx.offsets.assign(npix + 1, 0);

  for (const Event& e : stream.events) {
    if (e.t * tick_s >= horizon_s) {
      ++idx.trailing;
      continue;
    }
    if (e.polarity > 0)
      ++idx.offsets[static_cast<std::size_t>(e.y) * stream.width + e.x + 1];
  }
  for (std::size_t p = 1; p <= npix; ++p) idx.offsets[p] += idx.offsets[p - 1];

  idx.ticks.resize(idx.offsets[npix]);
  std::vector<std::size_t> cursor(idx.offsets.begin(), idx.offsets.end() - 1);
  for (const Event& e : stream.events) {
    if (e.polarity <= 0 || e.t * tick_s >= horizon_s) continue;
    const std::size_t p = static_cast<std::size_t>(e.y) * stream.width + e.x;
    idx.ticks[cursor[p]++] = e.t;
  }
  return idx;
}

double interval_estimate(const std::vector<double>& times, IeiEstimator estimator,
                         std::vector<double>& diffs) {
  if (estimator == IeiEstimator::FirstPair) return times[1] - times[0];
  diffs.clear();
  for (std::size_t i = 1; i < times.size(); ++i) diffs.push_back(times[i] - times[i - 1]);
  std::sort(diffs.begin(), diffs.end());
  const std::size_t n = diffs.size();
  return n % 2 ? diffs[n / 2] : 0.5 * (diffs[n / 2 - 1] + diffs[n / 2]);
}

struct IeiContext {
  ModulationSchedule sched;
  PhotometricModel photo;
  IeiOptions opts;
  double tick_s;
  double window_lo;  // offsets within a cycle
  double window_hi;
  double hk;
};

void iei_pixel(const IeiContext& ctx, const PixelIndex& idx, std::size_t p,
               std::vector<Grid>& frames, std::vector<std::vector<std::uint8_t>>& conf,
               std::vector<double>& times, std::vector<double>& diffs) {
  const double period = ctx.sched.period_s;

  auto flush = [&](int cycle) {
    if (cycle < 0 || times.empty()) return;
    if (times.size() >= static_cast<std::size_t>(ctx.opts.min_events)) {
      const double dt = interval_estimate(times, ctx.opts.estimator, diffs);
      frames[static_cast<std::size_t>(cycle)].data[p] = ctx.photo.c_thr / (ctx.hk * dt);
      conf[static_cast<std::size_t>(cycle)][p] = static_cast<std::uint8_t>(Confidence::Measured);
    } else {
      frames[static_cast<std::size_t>(cycle)].data[p] = ctx.opts.single_event_value;
      conf[static_cast<std::size_t>(cycle)][p] =
          static_cast<std::uint8_t>(Confidence::SingleEvent);
    }
    times.clear();
  };

  times.clear();
  int current = -1;
  for (std::size_t i = idx.offsets[p]; i < idx.offsets[p + 1]; ++i) {
    const double ts = idx.ticks[i] * ctx.tick_s;
    int cycle = static_cast<int>(ts / period);
    if (cycle >= ctx.sched.cycles) cycle = ctx.sched.cycles - 1;
    if (cycle != current) {
      flush(current);
      current = cycle;
    }
    const double local = ts - cycle * period;
    if (local >= ctx.window_lo && local < ctx.window_hi) times.push_back(ts);
  }
  flush(current);
}

ReconResult reconstruct_iei_impl(const EventStream& stream, const ModulationSchedule& sched,
                                 const PhotometricModel& photo, const IeiOptions& opts,
                                 bool parallel) {
  check_schedule_recon(sched);
  if (!(photo.c_thr > 0) || !(photo.gain_k > 0))
    throw std::invalid_argument("photometric: K and c_thr must be > 0");
  if (opts.guard < 0 || opts.guard >= 1)
    throw std::invalid_argument("iei: guard must be in [0,1)");
  if (opts.min_events < 2) throw std::invalid_argument("iei: min_events must be >= 2");
  if (stream.width == 0 || stream.height == 0)
    throw std::invalid_argument("iei: stream has empty geometry");

  const std::size_t npix = static_cast<std::size_t>(stream.width) * stream.height;
  const double tick_s = stream.tick_seconds();
  const double duty_s = sched.on_seconds();

  ReconResult res;
  res.frames.width = stream.width;
  res.frames.height = stream.height;
  res.frames.frames.assign(static_cast<std::size_t>(sched.cycles),
                           Grid(stream.width, stream.height, 0.0));
  res.frames.confidence.assign(
      static_cast<std::size_t>(sched.cycles),
      std::vector<std::uint8_t>(npix, static_cast<std::uint8_t>(Confidence::Empty)));

  PixelIndex idx = group_positives(stream, tick_s, sched.total_seconds());
  res.trailing_events_ignored = idx.trailing;

  IeiContext ctx{sched,  photo,
                 opts,   tick_s,
                 opts.guard * duty_s, duty_s,
                 sched.ramp_rate() * photo.gain_k};

  if (parallel) {
#pragma omp parallel num_threads(worker_count())
    {
      std::vector<double> times, diffs;
#pragma omp for schedule(dynamic, 256)
      for (std::int64_t p = 0; p < static_cast<std::int64_t>(npix); ++p)
        iei_pixel(ctx, idx, static_cast<std::size_t>(p), res.frames.frames,
                  res.frames.confidence, times, diffs);
    }
  } else {
    std::vector<double> times, diffs;
    for (std::size_t p = 0; p < npix; ++p)
      iei_pixel(ctx, idx, p, res.frames.frames, res.frames.confidence, times, diffs);
  }

  for (const auto& c : res.frames.confidence)
    for (std::uint8_t f : c) {
      if (f == static_cast<std::uint8_t>(Confidence::Measured))
        ++res.measured_px;
      else if (f == static_cast<std::uint8_t>(Confidence::SingleEvent))
        ++res.single_event_px;
      else
        ++res.empty_px;
    }
  return res;
}

}  // namespace

ReconResult reconstruct_iei(const EventStream& stream, const ModulationSchedule& sched,
                            const PhotometricModel& photo, const IeiOptions& opts) {
  return reconstruct_iei_impl(stream, sched, photo, opts, true);
}

ReconResult reconstruct_iei_serial(const EventStream& stream, const ModulationSchedule& sched,
                                   const PhotometricModel& photo, const IeiOptions& opts) {
  return reconstruct_iei_impl(stream, sched, photo, opts, false);
}

ReconResult reconstruct_integration(const EventStream& stream, double frame_interval_s,
                                    double c_thr) {
  if (!(frame_interval_s > 0)) throw std::invalid_argument("integration: frame interval <= 0");
  if (!(c_thr > 0)) throw std::invalid_argument("integration: c_thr <= 0");
  if (stream.width == 0 || stream.height == 0)
    throw std::invalid_argument("integration: stream has empty geometry");

  const std::size_t npix = static_cast<std::size_t>(stream.width) * stream.height;
  const double duration = stream.duration_seconds();
  const std::size_t n_frames =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(duration / frame_interval_s - 1e-12)));

  ReconResult res;
  res.frames.width = stream.width;
  res.frames.height = stream.height;

  std::vector<double> state(npix, 0.0);
  std::vector<std::uint8_t> touched(npix, 0);
  std::size_t i = 0;
  const double tick_s = stream.tick_seconds();
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double boundary = (f + 1) * frame_interval_s;
    for (; i < stream.events.size() && stream.events[i].t * tick_s < boundary; ++i) {
      const Event& e = stream.events[i];
      const std::size_t p = static_cast<std::size_t>(e.y) * stream.width + e.x;
      state[p] += e.polarity * c_thr;
      touched[p] = 1;
    }
    Grid g(stream.width, stream.height);
    std::vector<std::uint8_t> conf(npix);
    for (std::size_t p = 0; p < npix; ++p) {
      g.data[p] = std::max(0.0, std::expm1(state[p]));
      conf[p] = static_cast<std::uint8_t>(touched[p] ? Confidence::Measured
                                                     : Confidence::Empty);
      if (touched[p])
        ++res.measured_px;
      else
        ++res.empty_px;
    }
    res.frames.frames.push_back(std::move(g));
    res.frames.confidence.push_back(std::move(conf));
  }
  return res;
}

RegimeReport regime_check(const EventStream& stream, const ModulationSchedule& sched,
                          double flag_cv) {
  check_schedule_recon(sched);
  RegimeReport rep;
  rep.ratio_cv = std::numeric_limits<double>::infinity();
  if (stream.width == 0 || stream.height == 0) return rep;

  const std::size_t npix = static_cast<std::size_t>(stream.width) * stream.height;
  const double tick_s = stream.tick_seconds();
  const double period = sched.period_s;
  PixelIndex idx = group_positives(stream, tick_s, sched.total_seconds());

  std::vector<double> pixel_means(npix, 0.0);
  std::vector<std::uint8_t> pixel_has(npix, 0);

#pragma omp parallel for schedule(dynamic, 256) num_threads(worker_count())
  for (std::int64_t pp = 0; pp < static_cast<std::int64_t>(npix); ++pp) {
    const std::size_t p = static_cast<std::size_t>(pp);
    double sum = 0;
    std::size_t count = 0;
    std::size_t i = idx.offsets[p];
    const std::size_t end = idx.offsets[p + 1];
    while (i < end) {
      const int cycle = static_cast<int>(idx.ticks[i] * tick_s / period);
      std::size_t j = i;
      while (j < end && static_cast<int>(idx.ticks[j] * tick_s / period) == cycle) ++j;
      if (j - i >= 3) {
        const double onset = cycle * period;
        for (std::size_t k = i + 1; k < j; ++k) {
          const double prev = idx.ticks[k - 1] * tick_s - onset;
          const double curr = idx.ticks[k] * tick_s - onset;
          if (prev > 0) {
            sum += curr / prev;
            ++count;
          }
        }
      }
      i = j;
    }
    if (count > 0) {
      pixel_means[p] = sum / static_cast<double>(count);
      pixel_has[p] = 1;
    }
  }

  double total = 0;
  std::size_t n = 0;
  for (std::size_t p = 0; p < npix; ++p)
    if (pixel_has[p]) {
      total += pixel_means[p];
      ++n;
    }
  rep.pixels_used = n;
  if (n == 0) return rep;
  rep.ratio_mean = total / static_cast<double>(n);
  if (n < 2) return rep;  // cv stays infinite, flagged stays false

  double sq = 0;
  for (std::size_t p = 0; p < npix; ++p)
    if (pixel_has[p]) {
      const double d = pixel_means[p] - rep.ratio_mean;
      sq += d * d;
    }
  const double sd = std::sqrt(sq / static_cast<double>(n));
  rep.ratio_cv = rep.ratio_mean != 0 ? sd / rep.ratio_mean
                                     : std::numeric_limits<double>::infinity();
  rep.flagged = rep.ratio_cv < flag_cv;
  return rep;
}

}  // namespace ieim
