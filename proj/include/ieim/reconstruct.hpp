#pragma once

#include <cstdint>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

enum class IeiEstimator { FirstPair, MedianInterval };

struct IeiOptions {
  IeiEstimator estimator = IeiEstimator::MedianInterval;
  double guard = 0.0;             // fraction of the on phase ignored at ramp start
  int min_events = 2;             // positives needed to mark a pixel measured
  double single_event_value = 0;  // value assigned below min_events (>= 1 event)
};

/// Eq.-style regime diagnostic: per-pixel means of consecutive onset-relative
/// timestamp ratios, their cross-pixel mean and coefficient of variation.
/// Pixel-independent ratios (low cv) indicate the high-intensity regime in
/// which intervals stop encoding density.
struct RegimeReport {
  double ratio_mean = 0;
  double ratio_cv = 0;
  bool flagged = false;
  std::size_t pixels_used = 0;
};

struct ReconResult {
  FrameSequence frames;
  std::uint64_t trailing_events_ignored = 0;
  std::uint64_t measured_px = 0;
  std::uint64_t single_event_px = 0;
  std::uint64_t empty_px = 0;
};

/// Inter-event-interval reconstruction: one frame per modulation cycle.
/// Per pixel and cycle the positive events inside the guarded on-phase
/// window give an interval estimate dt, and density is c_thr/(H*K*dt).
/// Negative-polarity events are ignored. OpenMP-parallel over pixels; the
/// _serial variant is the reference and produces identical output.
ReconResult reconstruct_iei(const EventStream& stream, const ModulationSchedule& sched,
                            const PhotometricModel& photo, const IeiOptions& opts = {});
ReconResult reconstruct_iei_serial(const EventStream& stream, const ModulationSchedule& sched,
                                   const PhotometricModel& photo, const IeiOptions& opts = {});

/// Direct-integration baseline: running log-state per pixel, one frame per
/// frame_interval, value exp(state) - 1 floored at zero.
ReconResult reconstruct_integration(const EventStream& stream, double frame_interval_s,
                                    double c_thr);

RegimeReport regime_check(const EventStream& stream, const ModulationSchedule& sched,
                          double flag_cv = 0.01);

}  // namespace ieim
