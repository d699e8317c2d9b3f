#include "camwsol/localization.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

std::vector<Component> label(const BinaryMap& b, bool keep_pixels) {
  const std::size_t h = b.height;
  const std::size_t w = b.width;
  std::vector<std::uint8_t> seen(b.bits.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<Component> comps;

  for (std::size_t start = 0; start < b.bits.size(); ++start) {
    if (!b.bits[start] || seen[start]) continue;
    Component c;
    c.box = {static_cast<std::int64_t>(start % w), static_cast<std::int64_t>(start / w),
             static_cast<std::int64_t>(start % w) + 1, static_cast<std::int64_t>(start / w) + 1};
    seen[start] = 1;
    stack.assign(1, start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      const std::size_t i = p / w;
      const std::size_t j = p % w;
      ++c.pixel_count;
      if (keep_pixels) c.pixels.push_back(p);
      c.box.x_min = std::min<std::int64_t>(c.box.x_min, j);
      c.box.y_min = std::min<std::int64_t>(c.box.y_min, i);
      c.box.x_max = std::max<std::int64_t>(c.box.x_max, j + 1);
      c.box.y_max = std::max<std::int64_t>(c.box.y_max, i + 1);
      auto visit = [&](std::size_t q) {
        if (b.bits[q] && !seen[q]) {
          seen[q] = 1;
          stack.push_back(q);
        }
      };
      if (i > 0) visit(p - w);
      if (i + 1 < h) visit(p + w);
      if (j > 0) visit(p - 1);
      if (j + 1 < w) visit(p + 1);
    }
    if (keep_pixels) std::ranges::sort(c.pixels);
    comps.push_back(std::move(c));
  }
  std::ranges::stable_sort(comps, std::greater<>{}, &Component::pixel_count);
  return comps;
}

}  // namespace

std::size_t BinaryMap::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

BoxSet::BoxSet(std::vector<Box> boxes) : boxes_(std::move(boxes)) {
  areas_.reserve(boxes_.size());
  for (const Box& b : boxes_) {
    if (!b.valid()) fail(ErrorCode::InvalidArgument, "degenerate box in BoxSet");
    areas_.push_back(b.area());
  }
}

Heatmap normalize(const Heatmap& h) {
  Heatmap out{h.height, h.width, std::vector<double>(h.values.size(), 0.0), true};
  if (h.values.empty()) return out;
  const auto [lo, hi] = std::ranges::minmax_element(h.values);
  const double mn = *lo;
  const double range = *hi - mn;
  if (!(range > 0.0)) return out;
  for (std::size_t p = 0; p < h.values.size(); ++p) out.values[p] = (h.values[p] - mn) / range;
  return out;
}

bool is_degenerate(const Heatmap& normalized) noexcept {
  return std::ranges::all_of(normalized.values, [](double v) { return v == 0.0; });
}

BinaryMap binarize(const Heatmap& h, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) fail(ErrorCode::TauOutOfRange, "tau " + std::to_string(tau) + " outside [0, 1]");
  if (!h.normalized) fail(ErrorCode::InvalidArgument, "binarize expects a normalized heatmap");
  BinaryMap b{h.height, h.width, std::vector<std::uint8_t>(h.values.size()), tau};
  for (std::size_t p = 0; p < h.values.size(); ++p) b.bits[p] = h.values[p] >= tau ? 1 : 0;
  return b;
}

std::vector<Component> connected_components(const BinaryMap& b) { return label(b, true); }

Box scale_box(const Box& g, std::size_t grid_height, std::size_t grid_width, ImageSize image) {
  const auto gh = static_cast<std::int64_t>(grid_height);
  const auto gw = static_cast<std::int64_t>(grid_width);
  // Integer floor/ceil of coordinate * image / grid; all operands are non-negative.
  return {g.x_min * image.width / gw, g.y_min * image.height / gh, (g.x_max * image.width + gw - 1) / gw,
          (g.y_max * image.height + gh - 1) / gh};
}

BoxSet boxes_from_binary(const BinaryMap& b, BoxMode mode, ImageSize image) {
  if (image.width < static_cast<std::int64_t>(b.width) || image.height < static_cast<std::int64_t>(b.height)) {
    fail(ErrorCode::InvalidArgument, "image is smaller than the heatmap grid");
  }
  const auto comps = label(b, false);
  std::vector<Box> boxes;
  for (const auto& c : comps) {
    boxes.push_back(scale_box(c.box, b.height, b.width, image));
    if (mode == BoxMode::LargestOnly) break;
  }
  return BoxSet(std::move(boxes));
}

BoxSet localize(const Heatmap& normalized, double tau, BoxMode mode, ImageSize image) {
  const BinaryMap b = binarize(normalized, tau);
  if (is_degenerate(normalized)) return {};
  return boxes_from_binary(b, mode, image);
}

double iou(const Box& a, const Box& b) noexcept {
  const std::int64_t iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const std::int64_t ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  const std::int64_t inter = (iw > 0 && ih > 0) ? iw * ih : 0;
  const std::int64_t uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

}  // namespace camwsol
