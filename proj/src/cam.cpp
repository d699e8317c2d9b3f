#include "camwsol/cam.hpp"

#include <cmath>
#include <string>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::NonFiniteData, std::string(what) + " contains NaN or Inf");
  }
}

void check_class(const ClassifierWeights& w, std::size_t class_index) {
  if (class_index >= w.classes()) {
    fail(ErrorCode::ClassOutOfRange,
         "class " + std::to_string(class_index) + " not in [0, " + std::to_string(w.classes()) + ")");
  }
}

}  // namespace

FeatureMapStack::FeatureMapStack(std::size_t channels, std::size_t height, std::size_t width,
                                 std::vector<double> values)
    : channels_(channels), height_(height), width_(width), values_(std::move(values)) {
  if (channels_ == 0 || height_ == 0 || width_ == 0) fail(ErrorCode::InvalidTensor, "feature map dims must be >= 1");
  if (values_.size() != channels_ * height_ * width_) fail(ErrorCode::InvalidTensor, "feature map size mismatch");
  require_finite(values_, "feature map");
}

FeatureMapStack FeatureMapStack::from_tensor(const Tensor& t) {
  if (t.rank() != 3) fail(ErrorCode::InvalidTensor, "feature map tensor must have rank 3 (N, I, J)");
  return {t.shape[0], t.shape[1], t.shape[2], t.data};
}

ClassifierWeights::ClassifierWeights(std::size_t channels, std::size_t classes, std::vector<double> values)
    : channels_(channels), classes_(classes), values_(std::move(values)) {
  if (channels_ == 0 || classes_ == 0) fail(ErrorCode::InvalidTensor, "weight dims must be >= 1");
  if (values_.size() != channels_ * classes_) fail(ErrorCode::InvalidTensor, "weight size mismatch");
  require_finite(values_, "weights");
}

ClassifierWeights ClassifierWeights::from_tensor(const Tensor& t) {
  if (t.rank() != 2) fail(ErrorCode::InvalidTensor, "weight tensor must have rank 2 (N, C)");
  return {t.shape[0], t.shape[1], t.data};
}

std::vector<double> ClassifierWeights::column(std::size_t c) const {
  std::vector<double> col(channels_);
  for (std::size_t n = 0; n < channels_; ++n) col[n] = at(n, c);
  return col;
}

Heatmap Heatmap::from_tensor(const Tensor& t) {
  Heatmap h;
  if (t.rank() == 2) {
    h.height = t.shape[0];
    h.width = t.shape[1];
  } else if (t.rank() == 3 && t.shape[0] == 1) {
    h.height = t.shape[1];
    h.width = t.shape[2];
  } else {
    fail(ErrorCode::InvalidTensor, "heatmap tensor must be (I, J) or (1, I, J)");
  }
  h.values = t.data;
  require_finite(h.values, "heatmap");
  return h;
}

Tensor Heatmap::to_tensor(DType dtype) const {
  Tensor t;
  t.shape = {height, width};
  t.dtype = dtype;
  t.data = values;
  if (dtype == DType::F32) {
    for (double& v : t.data) v = static_cast<float>(v);
  }
  return t;
}

WeightFilter WeightFilter::band(double lo, double hi) {
  if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "weight band requires lo < hi");
  return {Mode::Band, lo, hi};
}

bool WeightFilter::selects(double weight) const noexcept {
  switch (mode) {
    case Mode::All: return true;
    case Mode::PositiveOnly: return weight > 0.0;
    case Mode::NegativeOnly: return weight < 0.0;
    case Mode::Band: return lo < weight && weight <= hi;
  }
  return false;
}

GapVector gap(const FeatureMapStack& f) {
  GapVector g;
  g.values.resize(f.channels());
  const double count = static_cast<double>(f.plane_size());
  for (std::size_t n = 0; n < f.channels(); ++n) {
    double sum = 0.0;
    for (double v : f.channel(n)) sum += v;
    g.values[n] = sum / count;
  }
  return g;
}

Heatmap cam(const FeatureMapStack& f, const ClassifierWeights& w, std::size_t class_index,
            const WeightFilter& filter) {
  check_class(w, class_index);
  if (w.channels() != f.channels()) {
    fail(ErrorCode::InvalidArgument, "weights have " + std::to_string(w.channels()) + " channels, feature map " +
                                         std::to_string(f.channels()));
  }
  Heatmap h{f.height(), f.width(), std::vector<double>(f.plane_size(), 0.0), false};
  std::size_t selected = 0;
  for (std::size_t n = 0; n < f.channels(); ++n) {
    const double weight = w.at(n, class_index);
    if (!filter.selects(weight)) continue;
    ++selected;
    const auto plane = f.channel(n);
    for (std::size_t p = 0; p < plane.size(); ++p) h.values[p] += weight * plane[p];
  }
  if (selected == 0) fail(ErrorCode::EmptySelection, "weight filter selects no channels for class " + std::to_string(class_index));
  return h;
}

double logit_from_gap(const GapVector& g, const ClassifierWeights& w, std::size_t class_index) {
  check_class(w, class_index);
  if (g.values.size() != w.channels()) fail(ErrorCode::InvalidArgument, "GAP length differs from weight rows");
  double logit = 0.0;
  for (std::size_t n = 0; n < g.values.size(); ++n) logit += w.at(n, class_index) * g.values[n];
  return logit;
}

}  // namespace camwsol
