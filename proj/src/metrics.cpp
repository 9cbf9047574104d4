#include "ieim/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace ieim {

double mse(const Grid& a, const Grid& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("mse: shape mismatch");
  if (a.size() == 0) throw std::invalid_argument("mse: empty grids");
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.data[i] - b.data[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double ssim(const Grid& a, const Grid& b, const SsimParams& params) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("ssim: shape mismatch");
  if (params.window < 3 || params.window % 2 == 0)
    throw std::invalid_argument("ssim: window must be odd and >= 3");
  if (!(params.gaussian_sigma > 0)) throw std::invalid_argument("ssim: sigma must be > 0");
  if (a.width < params.window || a.height < params.window)
    throw std::invalid_argument("ssim: image smaller than window");

  const int r = params.window / 2;
  std::vector<double> w(static_cast<std::size_t>(params.window) * params.window);
  double wsum = 0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double v = std::exp(-(dx * dx + dy * dy) /
                                (2.0 * params.gaussian_sigma * params.gaussian_sigma));
      w[static_cast<std::size_t>(dy + r) * params.window + (dx + r)] = v;
      wsum += v;
    }
  for (double& v : w) v /= wsum;

  const double c1 = (params.k1 * params.data_range) * (params.k1 * params.data_range);
  const double c2 = (params.k2 * params.data_range) * (params.k2 * params.data_range);

  double total = 0;
  std::size_t count = 0;
  for (int cy = r; cy < a.height - r; ++cy) {
    for (int cx = r; cx < a.width - r; ++cx) {
      double mua = 0, mub = 0, saa = 0, sbb = 0, sab = 0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          const double wi = w[static_cast<std::size_t>(dy + r) * params.window + (dx + r)];
          const double va = a.at(cx + dx, cy + dy);
          const double vb = b.at(cx + dx, cy + dy);
          mua += wi * va;
          mub += wi * vb;
          saa += wi * va * va;
          sbb += wi * vb * vb;
          sab += wi * va * vb;
        }
      const double vara = saa - mua * mua;
      const double varb = sbb - mub * mub;
      const double cov = sab - mua * mub;
      const double num = (2 * mua * mub + c1) * (2 * cov + c2);
      const double den = (mua * mua + mub * mub + c1) * (vara + varb + c2);
      total += num / den;
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

BandwidthReport stream_stats(const EventStream& stream, double duration_s,
                             const FrameEquivalent& frame) {
  if (!(duration_s > 0)) throw std::invalid_argument("stream_stats: duration must be > 0");
  BandwidthReport r;
  r.events_per_s = static_cast<double>(stream.events.size()) / duration_s;
  r.bytes_per_s = 16.0 * r.events_per_s;
  r.frame_equiv_bytes_per_s = static_cast<double>(frame.width) * frame.height *
                              frame.bit_depth / 8.0 * frame.fps;
  r.ratio = r.frame_equiv_bytes_per_s > 0 ? r.bytes_per_s / r.frame_equiv_bytes_per_s : 0.0;
  return r;
}

std::optional<double> dynamic_range_db(const Grid& values,
                                       const std::vector<std::uint8_t>& confidence) {
  if (values.size() != confidence.size())
    throw std::invalid_argument("dynamic_range: shape mismatch");
  double maxv = 0;
  double minv = 0;
  bool any = false, any_positive = false;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (confidence[i] != static_cast<std::uint8_t>(Confidence::Measured)) continue;
    any = true;
    const double v = values.data[i];
    if (v > 0) {
      if (!any_positive || v < minv) minv = v;
      any_positive = true;
    }
    if (v > maxv) maxv = v;
  }
  if (!any) return std::nullopt;
  if (!any_positive || maxv <= 0) return 0.0;
  return 20.0 * std::log10(maxv / minv);
}

double pearson(const Grid& a, const Grid& b) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("pearson: shape mismatch");
  const double n = static_cast<double>(a.size());
  if (n == 0) return 0;
  double sa = 0, sb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a.data[i];
    sb += b.data[i];
  }
  const double ma = sa / n, mb = sb / n;
  double vaa = 0, vbb = 0, vab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a.data[i] - ma;
    const double db = b.data[i] - mb;
    vaa += da * da;
    vbb += db * db;
    vab += da * db;
  }
  if (vaa <= 0 || vbb <= 0) return 0;
  return vab / std::sqrt(vaa * vbb);
}

}  // namespace ieim
