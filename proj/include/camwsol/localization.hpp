#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "camwsol/box.hpp"
#include "camwsol/cam.hpp"

namespace camwsol {

struct BinaryMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> bits;  // row-major, 0 or 1
  double threshold_used = 0.0;

  bool at(std::size_t i, std::size_t j) const noexcept { return bits[i * width + j] != 0; }
  std::size_t count() const noexcept;
};

/// A 4-connected component. `box` is in heatmap grid coordinates, half-open.
struct Component {
  std::size_t pixel_count = 0;
  Box box;
  std::vector<std::size_t> pixels;  // row-major indices, ascending
};

enum class BoxMode { LargestOnly, AllComponents };

class BoxSet {
 public:
  BoxSet() = default;
  explicit BoxSet(std::vector<Box> boxes);

  const std::vector<Box>& boxes() const noexcept { return boxes_; }
  const std::vector<std::int64_t>& areas() const noexcept { return areas_; }
  std::size_t size() const noexcept { return boxes_.size(); }
  bool empty() const noexcept { return boxes_.empty(); }

 private:
  std::vector<Box> boxes_;
  std::vector<std::int64_t> areas_;
};

/// Min-max rescale to [0, 1]; a constant map becomes all zeros.
Heatmap normalize(const Heatmap& h);

/// A normalized map that is all zeros came from a constant input.
bool is_degenerate(const Heatmap& normalized) noexcept;

/// bit = value >= tau. Throws TauOutOfRange outside [0, 1] and
/// InvalidArgument when `h` is not normalized.
BinaryMap binarize(const Heatmap& h, double tau);

/// Components sorted by pixel count descending; ties keep raster order of
/// each component's first pixel.
std::vector<Component> connected_components(const BinaryMap& b);

/// Maps a grid box to image pixels, flooring mins and ceiling maxes.
Box scale_box(const Box& grid_box, std::size_t grid_height, std::size_t grid_width, ImageSize image);

BoxSet boxes_from_binary(const BinaryMap& b, BoxMode mode, ImageSize image);

/// normalize-free convenience used by scoring: `h` must be normalized;
/// degenerate maps produce an empty set at every tau.
BoxSet localize(const Heatmap& normalized, double tau, BoxMode mode, ImageSize image);

double iou(const Box& a, const Box& b) noexcept;

}  // namespace camwsol
