#pragma once
// Test-only generators and brute-force oracles. Nothing here calls into the
// code paths it is used to check.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "camwsol/box.hpp"
#include "camwsol/cam.hpp"
#include "camwsol/localization.hpp"

namespace testsupport {

using Rng = std::mt19937_64;

inline std::vector<double> uniform(Rng& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = dist(rng);
  return v;
}

inline std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline camwsol::FeatureMapStack random_stack(Rng& rng, std::size_t n, std::size_t h, std::size_t w,
                                             double lo = -1.0, double hi = 5.0) {
  return {n, h, w, uniform(rng, n * h * w, lo, hi)};
}

inline camwsol::ClassifierWeights random_weights(Rng& rng, std::size_t n, std::size_t c) {
  return {n, c, uniform(rng, n * c, -0.2, 0.2)};
}

inline camwsol::BinaryMap random_binary(Rng& rng, std::size_t h, std::size_t w, double density) {
  std::bernoulli_distribution coin(density);
  camwsol::BinaryMap b{h, w, std::vector<std::uint8_t>(h * w), 0.5};
  for (auto& bit : b.bits) bit = coin(rng) ? 1 : 0;
  return b;
}

/// Recursive flood fill; returns the partition as a set of sorted pixel sets.
inline std::set<std::vector<std::size_t>> flood_fill_partition(const camwsol::BinaryMap& b) {
  std::vector<int> label(b.bits.size(), -1);
  std::vector<std::vector<std::size_t>> parts;
  std::function<void(std::size_t, std::size_t, int)> fill = [&](std::size_t i, std::size_t j, int id) {
    const std::size_t p = i * b.width + j;
    if (!b.bits[p] || label[p] != -1) return;
    label[p] = id;
    parts[static_cast<std::size_t>(id)].push_back(p);
    if (i > 0) fill(i - 1, j, id);
    if (i + 1 < b.height) fill(i + 1, j, id);
    if (j > 0) fill(i, j - 1, id);
    if (j + 1 < b.width) fill(i, j + 1, id);
  };
  for (std::size_t i = 0; i < b.height; ++i) {
    for (std::size_t j = 0; j < b.width; ++j) {
      if (b.bits[i * b.width + j] && label[i * b.width + j] == -1) {
        parts.emplace_back();
        fill(i, j, static_cast<int>(parts.size() - 1));
      }
    }
  }
  std::set<std::vector<std::size_t>> out;
  for (auto& p : parts) {
    std::sort(p.begin(), p.end());
    out.insert(p);
  }
  return out;
}

/// IoU by painting both boxes onto a pixel canvas.
inline double pixel_iou(const camwsol::Box& a, const camwsol::Box& b) {
  const std::int64_t w = std::max(a.x_max, b.x_max);
  const std::int64_t h = std::max(a.y_max, b.y_max);
  std::int64_t inter = 0, uni = 0;
  for (std::int64_t y = 0; y < h; ++y) {
    for (std::int64_t x = 0; x < w; ++x) {
      const bool in_a = x >= a.x_min && x < a.x_max && y >= a.y_min && y < a.y_max;
      const bool in_b = x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  return uni ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

/// Heatmap at image resolution: 1 inside `box`, 0 elsewhere.
inline camwsol::Heatmap indicator(std::size_t h, std::size_t w, const camwsol::Box& box, double inside = 1.0,
                                  double outside = 0.0) {
  camwsol::Heatmap m{h, w, std::vector<double>(h * w, outside), false};
  for (auto y = box.y_min; y < box.y_max; ++y) {
    for (auto x = box.x_min; x < box.x_max; ++x) m.values[static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)] = inside;
  }
  return m;
}

// Hand-assembled container, independent of encode_tensor.
inline std::vector<std::byte> raw_npy(const std::string& dict, const std::vector<std::byte>& payload,
                                    const std::string& magic = "\x93NUMPY", std::uint8_t major = 1) {
  std::string header = dict;
  while ((10 + header.size() + 1) % 64 != 0) header += ' ';
  header += '\n';
  std::vector<std::byte> out;
  for (char c : magic) out.push_back(std::byte(static_cast<unsigned char>(c)));
  out.push_back(std::byte{major});
  out.push_back(std::byte{0});
  out.push_back(std::byte(header.size() & 0xff));
  out.push_back(std::byte(header.size() >> 8));
  for (char c : header) out.push_back(std::byte(static_cast<unsigned char>(c)));
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

inline std::vector<std::byte> f64_payload(const std::vector<double>& v) {
  std::vector<std::byte> out(v.size() * 8);
  std::memcpy(out.data(), v.data(), out.size());  // test host is little-endian
  return out;
}

inline std::vector<std::byte> f32_payload(const std::vector<float>& v) {
  std::vector<std::byte> out(v.size() * 4);
  std::memcpy(out.data(), v.data(), out.size());
  return out;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream out(p, std::ios::binary);
  out << s;
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("camwsol_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testsupport
