#include "camwsol/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

constexpr double kLattice = 1e6;

// Cumulative contribution of the centered square of side s = 1..max(H, W),
// clipped to the map, together with the clipped pixel count. Each step adds
// the new strip, so the sums are nondecreasing by construction.
void centered_square_growth(std::span<const double> m, std::size_t h, std::size_t w, std::vector<double>& sums,
                            std::vector<std::size_t>& pixels) {
  const std::size_t sides = std::max(h, w);
  const auto cy = static_cast<std::int64_t>(h / 2);
  const auto cx = static_cast<std::int64_t>(w / 2);
  auto clip = [](std::int64_t v, std::size_t hi) {
    return static_cast<std::size_t>(std::clamp<std::int64_t>(v, 0, static_cast<std::int64_t>(hi)));
  };
  std::size_t r0 = 0, r1 = 0, c0 = 0, c1 = 0;  // current clipped region
  double acc = 0.0;
  for (std::size_t s = 1; s <= sides; ++s) {
    const auto half = static_cast<std::int64_t>(s / 2);
    const std::size_t nr0 = clip(cy - half, h), nr1 = clip(cy - half + static_cast<std::int64_t>(s), h);
    const std::size_t nc0 = clip(cx - half, w), nc1 = clip(cx - half + static_cast<std::int64_t>(s), w);
    for (std::size_t i = nr0; i < nr1; ++i) {
      for (std::size_t j = nc0; j < nc1; ++j) {
        const bool old = s > 1 && i >= r0 && i < r1 && j >= c0 && j < c1;
        if (!old) acc += m[i * w + j];
      }
    }
    r0 = nr0, r1 = nr1, c0 = nc0, c1 = nc1;
    sums.push_back(acc);
    pixels.push_back((r1 - r0) * (c1 - c0));
  }
}

void top_pixel_growth(std::span<const double> m, std::vector<double>& sums, std::vector<std::size_t>& pixels) {
  std::vector<double> sorted(m.begin(), m.end());
  std::ranges::sort(sorted, std::greater<>{});
  double acc = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    acc += sorted[k];
    sums.push_back(acc);
    pixels.push_back(k + 1);
  }
}

}  // namespace

double activation_area(std::span<const double> channel_map, double raw_threshold) {
  if (channel_map.empty()) return 0.0;
  const auto above = std::ranges::count_if(channel_map, [&](double v) { return v > raw_threshold; });
  return static_cast<double>(above) / static_cast<double>(channel_map.size());
}

std::vector<ChannelStat> channel_stats(const FeatureMapStack& f, const ClassifierWeights& w,
                                       std::size_t class_index, double raw_threshold) {
  if (class_index >= w.classes()) fail(ErrorCode::ClassOutOfRange, "class " + std::to_string(class_index) + " out of range");
  if (w.channels() != f.channels()) fail(ErrorCode::InvalidArgument, "weights and feature map disagree on N");
  const GapVector g = gap(f);
  std::vector<ChannelStat> rows(f.channels());
  for (std::size_t n = 0; n < f.channels(); ++n) {
    rows[n] = {n, w.at(n, class_index), activation_area(f.channel(n), raw_threshold), g.values[n]};
  }
  return rows;
}

ErfCurve erf_curve(const Tensor& contribution_map, std::span<const double> thresholds, ErfRegion region) {
  std::size_t h = 0, w = 0;
  if (contribution_map.rank() == 2) {
    h = contribution_map.shape[0], w = contribution_map.shape[1];
  } else if (contribution_map.rank() == 3 && contribution_map.shape[0] == 1) {
    h = contribution_map.shape[1], w = contribution_map.shape[2];
  } else {
    fail(ErrorCode::InvalidTensor, "contribution map must be (H, W) or (1, H, W)");
  }
  const std::span<const double> m = contribution_map.data;
  if (m.size() != h * w || m.empty()) fail(ErrorCode::InvalidTensor, "contribution map size mismatch");
  for (double v : m) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteData, "contribution map contains NaN or Inf");
    if (v < 0.0) fail(ErrorCode::NegativeContribution, "contribution map has negative entries");
  }
  if (std::ranges::all_of(m, [](double v) { return v == 0.0; })) {
    fail(ErrorCode::AllZeroContribution, "contribution map is all zero");
  }
  if (thresholds.empty()) fail(ErrorCode::InvalidArgument, "no ERF thresholds");
  std::vector<std::int64_t> lattice;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    const double t = thresholds[k];
    if (!(t > 0.0 && t <= 1.0)) fail(ErrorCode::InvalidArgument, "ERF thresholds must lie in (0, 1]");
    if (k && !(t > thresholds[k - 1])) fail(ErrorCode::InvalidArgument, "ERF thresholds must ascend");
    lattice.push_back(std::llround(t * kLattice));
  }

  std::vector<double> sums;
  std::vector<std::size_t> pixels;
  if (region == ErfRegion::CenteredSquare) {
    centered_square_growth(m, h, w, sums, pixels);
  } else {
    top_pixel_growth(m, sums, pixels);
  }
  const double total = sums.back();

  ErfCurve curve;
  curve.region = region;
  curve.thresholds.assign(thresholds.begin(), thresholds.end());
  const auto area = static_cast<std::int64_t>(h * w);
  for (double t : thresholds) {
    const double target = t * total;
    const auto it = std::ranges::lower_bound(sums, target);
    const std::size_t idx = it == sums.end() ? sums.size() - 1 : static_cast<std::size_t>(it - sums.begin());
    curve.region_pixels.push_back(pixels[idx]);
    curve.area_ratios.push_back(static_cast<double>(pixels[idx]) / static_cast<double>(area));
  }

  if (thresholds.size() == 1) {
    curve.auc = curve.area_ratios.front();
    return curve;
  }
  std::int64_t numerator = 0;
  for (std::size_t k = 0; k + 1 < thresholds.size(); ++k) {
    numerator += static_cast<std::int64_t>(curve.region_pixels[k] + curve.region_pixels[k + 1]) *
                 (lattice[k + 1] - lattice[k]);
  }
  const std::int64_t span = lattice.back() - lattice.front();
  curve.auc = static_cast<double>(numerator) / (2.0 * static_cast<double>(span) * static_cast<double>(area));
  return curve;
}

}  // namespace camwsol
