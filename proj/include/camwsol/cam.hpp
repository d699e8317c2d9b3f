#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camwsol/tensor_io.hpp"

namespace camwsol {

/// Final-conv activations of one image, laid out (channel, row, col).
class FeatureMapStack {
 public:
  FeatureMapStack(std::size_t channels, std::size_t height, std::size_t width, std::vector<double> values);
  /// Accepts rank-3 (N, I, J) tensors.
  static FeatureMapStack from_tensor(const Tensor& t);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane_size() const noexcept { return height_ * width_; }

  std::span<const double> channel(std::size_t n) const noexcept {
    return {values_.data() + n * plane_size(), plane_size()};
  }
  double at(std::size_t n, std::size_t i, std::size_t j) const noexcept {
    return values_[(n * height_ + i) * width_ + j];
  }
  std::span<const double> values() const noexcept { return values_; }

 private:
  std::size_t channels_;
  std::size_t height_;
  std::size_t width_;
  std::vector<double> values_;
};

/// FC weights, N rows (channels) by C columns (classes).
class ClassifierWeights {
 public:
  ClassifierWeights(std::size_t channels, std::size_t classes, std::vector<double> values);
  static ClassifierWeights from_tensor(const Tensor& t);

  std::size_t channels() const noexcept { return channels_; }
  std::size_t classes() const noexcept { return classes_; }
  double at(std::size_t n, std::size_t c) const noexcept { return values_[n * classes_ + c]; }
  /// Column c as a dense vector.
  std::vector<double> column(std::size_t c) const;

 private:
  std::size_t channels_;
  std::size_t classes_;
  std::vector<double> values_;
};

struct GapVector {
  std::vector<double> values;
};

struct Heatmap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> values;
  bool normalized = false;

  double at(std::size_t i, std::size_t j) const noexcept { return values[i * width + j]; }
  /// Accepts (I, J) or (1, I, J) tensors.
  static Heatmap from_tensor(const Tensor& t);
  Tensor to_tensor(DType dtype = DType::F64) const;
};

/// Channel selection by the sign or magnitude band of W[n, c].
/// Zero weights belong to neither sign; bands are half-open (lo, hi].
struct WeightFilter {
  enum class Mode { All, PositiveOnly, NegativeOnly, Band };

  Mode mode = Mode::All;
  double lo = 0.0;
  double hi = 0.0;

  static WeightFilter all() { return {}; }
  static WeightFilter positive_only() { return {Mode::PositiveOnly, 0.0, 0.0}; }
  static WeightFilter negative_only() { return {Mode::NegativeOnly, 0.0, 0.0}; }
  static WeightFilter band(double lo, double hi);

  bool selects(double weight) const noexcept;
};

GapVector gap(const FeatureMapStack& f);

/// Unnormalized class activation map restricted to the channels the filter
/// selects. Throws ClassOutOfRange, EmptySelection, or InvalidArgument when
/// the channel counts disagree.
Heatmap cam(const FeatureMapStack& f, const ClassifierWeights& w, std::size_t class_index,
            const WeightFilter& filter = WeightFilter::all());

double logit_from_gap(const GapVector& g, const ClassifierWeights& w, std::size_t class_index);

}  // namespace camwsol
