#include "camwsol/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

constexpr int kMaxSweeps = 100;
// Variance below this fraction of the raw signal energy is rounding noise.
constexpr double kDegenerateRatio = 1e-20;
// Gram-route directions with eigenvalues below this fraction of the largest
// are not recoverable in variable space.
constexpr double kRetainRatio = 1e-12;

void orient(std::vector<double>& v) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (std::abs(v[k]) > std::abs(v[best])) best = k;
  }
  if (v[best] < 0.0) {
    for (double& x : v) x = -x;
  }
}

// x is samples x variables, row-major.
PcaBasis pca_of_samples(std::span<const double> x, std::size_t samples, std::size_t variables) {
  if (samples < 2 || variables < 2) {
    fail(ErrorCode::InvalidArgument, "PCA needs at least 2 channels and 2 spatial locations");
  }
  PcaBasis basis;
  basis.samples = samples;
  basis.variables = variables;
  basis.means.assign(variables, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t n = 0; n < variables; ++n) basis.means[n] += x[s * variables + n];
  }
  for (double& m : basis.means) m /= static_cast<double>(samples);

  std::vector<double> xc(x.begin(), x.end());
  double raw_energy = 0.0;
  double total = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t n = 0; n < variables; ++n) {
      double& v = xc[s * variables + n];
      raw_energy += v * v;
      v -= basis.means[n];
      total += v * v;
    }
  }
  if (!(total > 0.0) || total <= kDegenerateRatio * raw_energy) {
    fail(ErrorCode::DegenerateStack, "feature maps have zero total variance");
  }
  basis.total_variance = total;

  if (variables <= samples) {
    std::vector<double> cov(variables * variables, 0.0);
    for (std::size_t p = 0; p < variables; ++p) {
      for (std::size_t q = p; q < variables; ++q) {
        double acc = 0.0;
        for (std::size_t s = 0; s < samples; ++s) acc += xc[s * variables + p] * xc[s * variables + q];
        cov[p * variables + q] = acc;
        cov[q * variables + p] = acc;
      }
    }
    const SymmetricEigen eig = jacobi_eigen(std::move(cov), variables);
    for (std::size_t k = 0; k < variables; ++k) {
      basis.eigenvalues.push_back(std::max(eig.values[k], 0.0));
      std::vector<double> v(variables);
      for (std::size_t n = 0; n < variables; ++n) v[n] = eig.vector_at(n, k);
      orient(v);
      basis.components.push_back(std::move(v));
    }
    return basis;
  }

  // More channels than locations: decompose the locations' Gram matrix and
  // map each eigenvector back to channel space.
  std::vector<double> gram(samples * samples, 0.0);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t t = s; t < samples; ++t) {
      double acc = 0.0;
      for (std::size_t n = 0; n < variables; ++n) acc += xc[s * variables + n] * xc[t * variables + n];
      gram[s * samples + t] = acc;
      gram[t * samples + s] = acc;
    }
  }
  const SymmetricEigen eig = jacobi_eigen(std::move(gram), samples);
  const double top = std::max(eig.values.front(), 0.0);
  for (std::size_t k = 0; k < samples; ++k) {
    const double lambda = std::max(eig.values[k], 0.0);
    basis.eigenvalues.push_back(lambda);
    if (!(lambda > kRetainRatio * top)) continue;
    std::vector<double> v(variables, 0.0);
    for (std::size_t s = 0; s < samples; ++s) {
      const double u = eig.vector_at(s, k);
      for (std::size_t n = 0; n < variables; ++n) v[n] += xc[s * variables + n] * u;
    }
    double norm = 0.0;
    for (double c : v) norm += c * c;
    norm = std::sqrt(norm);
    for (double& c : v) c /= norm;
    orient(v);
    basis.components.push_back(std::move(v));
  }
  return basis;
}

std::vector<double> samples_of(const FeatureMapStack& f) {
  const std::size_t s_count = f.plane_size();
  const std::size_t n_count = f.channels();
  std::vector<double> x(s_count * n_count);
  for (std::size_t n = 0; n < n_count; ++n) {
    const auto plane = f.channel(n);
    for (std::size_t s = 0; s < s_count; ++s) x[s * n_count + n] = plane[s];
  }
  return x;
}

}  // namespace

SymmetricEigen jacobi_eigen(std::vector<double> a, std::size_t n, double tolerance) {
  if (a.size() != n * n || n == 0) fail(ErrorCode::InvalidArgument, "jacobi_eigen expects a non-empty square matrix");
  SymmetricEigen out;
  out.n = n;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) v[k * n + k] = 1.0;

  double frob = 0.0;
  for (double x : a) frob += x * x;
  frob = std::sqrt(frob);

  for (int sweep = 0; sweep < kMaxSweeps && frob > 0.0; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a[p * n + q] * a[p * n + q];
    }
    if (std::sqrt(2.0 * off) <= tolerance * frob) break;
    out.sweeps = sweep + 1;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        a[p * n + q] = 0.0;
        a[q * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - s * vkq;
          v[k * n + q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::ranges::stable_sort(order, [&](std::size_t x, std::size_t y) { return a[x * n + x] > a[y * n + y]; });
  out.values.resize(n);
  out.vectors.resize(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a[order[k] * n + order[k]];
    for (std::size_t row = 0; row < n; ++row) out.vectors[row * n + k] = v[row * n + order[k]];
  }
  return out;
}

std::vector<double> PcaBasis::contribution_rates() const {
  // Rounding can leave the eigenvalue sum a few ulps above the trace.
  double denominator = total_variance, sum = 0.0;
  for (double v : eigenvalues) sum += v;
  denominator = std::max(denominator, sum);
  std::vector<double> rates(eigenvalues.size());
  for (std::size_t k = 0; k < rates.size(); ++k) rates[k] = std::min(1.0, eigenvalues[k] / denominator);
  return rates;
}

PcaBasis pca_basis(const FeatureMapStack& f) {
  const auto x = samples_of(f);
  return pca_of_samples(x, f.plane_size(), f.channels());
}

PcaResult pca_pc1(const FeatureMapStack& f) {
  const PcaBasis basis = pca_basis(f);
  const auto& axis = basis.components.front();
  PcaResult r;
  r.pc1_map = {f.height(), f.width(), std::vector<double>(f.plane_size(), 0.0), false};
  for (std::size_t n = 0; n < f.channels(); ++n) {
    const auto plane = f.channel(n);
    for (std::size_t s = 0; s < plane.size(); ++s) r.pc1_map.values[s] += (plane[s] - basis.means[n]) * axis[n];
  }
  r.contribution_rates = basis.contribution_rates();
  return r;
}

std::vector<double> pooled_contribution_rates(std::span<const FeatureMapStack> stacks) {
  if (stacks.empty()) fail(ErrorCode::InsufficientSamples, "no feature maps to pool");
  const std::size_t channels = stacks.front().channels();
  std::vector<double> x;
  std::size_t samples = 0;
  for (const auto& f : stacks) {
    if (f.channels() != channels) fail(ErrorCode::InvalidArgument, "pooled PCA needs equal channel counts");
    const auto part = samples_of(f);
    x.insert(x.end(), part.begin(), part.end());
    samples += f.plane_size();
  }
  return pca_of_samples(x, samples, channels).contribution_rates();
}

std::size_t edge_pixel_count(std::size_t height, std::size_t width) noexcept {
  if (height == 0 || width == 0) return 0;
  if (height == 1 || width == 1) return height * width;
  return 2 * (height + width) - 4;
}

double edge_mean(const BinaryMap& b) {
  const std::size_t h = b.height;
  const std::size_t w = b.width;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < h; ++i) {
    for (std::size_t j = 0; j < w; ++j) {
      if ((i == 0 || j == 0 || i + 1 == h || j + 1 == w) && b.at(i, j)) ++ones;
    }
  }
  const std::size_t edges = edge_pixel_count(h, w);
  return edges ? static_cast<double>(ones) / static_cast<double>(edges) : 0.0;
}

namespace {

BinaryMap mean_threshold(const Heatmap& h) {
  double sum = 0.0;
  for (double v : h.values) sum += v;
  const double mean = sum / static_cast<double>(h.values.size());
  BinaryMap b{h.height, h.width, std::vector<std::uint8_t>(h.values.size()), mean};
  for (std::size_t p = 0; p < h.values.size(); ++p) b.bits[p] = h.values[p] >= mean ? 1 : 0;
  return b;
}

}  // namespace

namespace {

bool border_brighter(const Heatmap& h) {
  double all = 0.0, border = 0.0;
  for (std::size_t i = 0; i < h.height; ++i) {
    for (std::size_t j = 0; j < h.width; ++j) {
      const double v = h.values[i * h.width + j];
      all += v;
      if (i == 0 || j == 0 || i + 1 == h.height || j + 1 == h.width) border += v;
    }
  }
  return border / static_cast<double>(edge_pixel_count(h.height, h.width)) > all / static_cast<double>(h.values.size());
}

}  // namespace

Pc1Localization localize_pc1_map(const Heatmap& pc1_map) {
  if (pc1_map.values.empty()) fail(ErrorCode::InvalidArgument, "empty PC1 map");
  Pc1Localization out;
  const BinaryMap raw = mean_threshold(pc1_map);
  out.edge_mean = edge_mean(raw);
  // A mostly-set border means the 1-region is background. On an exact tie
  // the border is background when it is brighter than the map as a whole.
  out.flipped = out.edge_mean > 0.5 || (out.edge_mean == 0.5 && border_brighter(pc1_map));
  out.polarity_corrected_map = pc1_map;
  out.polarity_corrected_map.normalized = false;
  if (out.flipped) {
    for (double& v : out.polarity_corrected_map.values) v = -v;
    out.binary_map = mean_threshold(out.polarity_corrected_map);
  } else {
    out.binary_map = raw;
  }
  return out;
}

Pc1Localization pc1_localize(const FeatureMapStack& f) { return localize_pc1_map(pca_pc1(f).pc1_map); }

}  // namespace camwsol
