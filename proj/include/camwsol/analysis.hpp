#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camwsol/cam.hpp"
#include "camwsol/tensor_io.hpp"

namespace camwsol {

/// Fraction of pixels strictly above `raw_threshold` (unnormalized units).
double activation_area(std::span<const double> channel_map, double raw_threshold = 10.0);

struct ChannelStat {
  std::size_t channel = 0;
  double weight = 0.0;
  double activation_area = 0.0;
  double gap_value = 0.0;
};

std::vector<ChannelStat> channel_stats(const FeatureMapStack& f, const ClassifierWeights& w,
                                       std::size_t class_index, double raw_threshold = 10.0);

enum class ErfRegion { CenteredSquare, TopPixels };

inline const std::vector<double>& default_erf_thresholds() {
  static const std::vector<double> t{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99};
  return t;
}

struct ErfCurve {
  ErfRegion region = ErfRegion::CenteredSquare;
  std::vector<double> thresholds;
  std::vector<std::size_t> region_pixels;  // pixels in the smallest qualifying region
  std::vector<double> area_ratios;         // region_pixels / (H * W)
  double auc = 0.0;
};

/// For each threshold t, the smallest region holding at least t of the total
/// contribution. The AUC is the trapezoid over the thresholds divided by
/// their span; thresholds are integrated on a 1e-6 lattice so the sum is
/// exact in integers.
///
/// `contribution_map` is (H, W) or (1, H, W), nonnegative and not all zero.
/// Thresholds must be strictly ascending in (0, 1].
ErfCurve erf_curve(const Tensor& contribution_map,
                   std::span<const double> thresholds = default_erf_thresholds(),
                   ErfRegion region = ErfRegion::CenteredSquare);

}  // namespace camwsol
