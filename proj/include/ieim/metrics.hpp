#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ieim/core.hpp"

namespace ieim {

struct SsimParams {
  int window = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;
};

/// Mean squared pixel difference. Inputs must be pre-normalized by the
/// caller; metrics never rescale.
double mse(const Grid& a, const Grid& b);

/// Mean local SSIM over Gaussian-weighted windows (valid centers only),
/// C1 = (k1*range)^2, C2 = (k2*range)^2.
double ssim(const Grid& a, const Grid& b, const SsimParams& params = {});

struct FrameEquivalent {
  int width = 0;
  int height = 0;
  int bit_depth = 16;
  double fps = 0;
};

struct BandwidthReport {
  double events_per_s = 0;
  double bytes_per_s = 0;           // at 16 bytes per event
  double frame_equiv_bytes_per_s = 0;
  double ratio = 0;                 // event bytes / frame bytes
};

BandwidthReport stream_stats(const EventStream& stream, double duration_s,
                             const FrameEquivalent& frame);

/// 20*log10(max / min positive) over measured pixels; nullopt when the
/// frame has no measured pixels.
std::optional<double> dynamic_range_db(const Grid& values,
                                       const std::vector<std::uint8_t>& confidence);

/// Pearson correlation over all pixels; 0 when either side is constant.
double pearson(const Grid& a, const Grid& b);

}  // namespace ieim
