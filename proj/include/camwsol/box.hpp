#pragma once

#include <compare>
#include <cstdint>

namespace camwsol {

/// Axis-aligned pixel box, half-open: [x_min, x_max) x [y_min, y_max).
struct Box {
  std::int64_t x_min = 0;
  std::int64_t y_min = 0;
  std::int64_t x_max = 0;
  std::int64_t y_max = 0;

  std::int64_t width() const noexcept { return x_max - x_min; }
  std::int64_t height() const noexcept { return y_max - y_min; }
  std::int64_t area() const noexcept { return width() * height(); }
  bool valid() const noexcept { return x_min < x_max && y_min < y_max; }

  friend bool operator==(const Box&, const Box&) = default;
};

struct ImageSize {
  std::int64_t width = 0;
  std::int64_t height = 0;

  friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

inline bool inside(const Box& b, const ImageSize& size) noexcept {
  return b.x_min >= 0 && b.y_min >= 0 && b.x_max <= size.width && b.y_max <= size.height;
}

}  // namespace camwsol
