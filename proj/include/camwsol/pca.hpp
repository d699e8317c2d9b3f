#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camwsol/cam.hpp"
#include "camwsol/localization.hpp"

namespace camwsol {

/// Eigen-decomposition of a dense symmetric matrix by cyclic Jacobi sweeps.
/// Eigenvalues are sorted descending; `vectors` is row-major n x n with
/// eigenvector k stored in column k.
struct SymmetricEigen {
  std::size_t n = 0;
  std::vector<double> values;
  std::vector<double> vectors;
  int sweeps = 0;

  double vector_at(std::size_t row, std::size_t k) const noexcept { return vectors[row * n + k]; }
};

SymmetricEigen jacobi_eigen(std::vector<double> matrix, std::size_t n, double tolerance = 1e-10);

/// Principal axes of a sample matrix whose rows are observations and whose
/// columns are variables (channels).
struct PcaBasis {
  std::size_t variables = 0;
  std::size_t samples = 0;
  std::vector<double> means;        // per variable
  std::vector<double> eigenvalues;  // descending, clamped at 0, length min(variables, samples)
  double total_variance = 0.0;      // sum of squared centered entries
  /// Orthonormal principal directions in variable space, one per retained
  /// eigenvalue, same order. Each direction's largest-magnitude entry is positive.
  std::vector<std::vector<double>> components;

  std::vector<double> contribution_rates() const;
};

/// Samples are spatial locations (I*J), variables are channels (N).
/// Throws DegenerateStack when the stack has no variance and InvalidArgument
/// when N < 2 or I*J < 2.
PcaBasis pca_basis(const FeatureMapStack& f);

struct PcaResult {
  Heatmap pc1_map;  // projection of each centered location on the first axis
  std::vector<double> contribution_rates;
};

PcaResult pca_pc1(const FeatureMapStack& f);

/// Explained-variance ratios of PCA fitted jointly over every location of
/// every stack. All stacks must share the channel count.
std::vector<double> pooled_contribution_rates(std::span<const FeatureMapStack> stacks);

struct Pc1Localization {
  Heatmap polarity_corrected_map;  // unnormalized; the object side is high
  BinaryMap binary_map;            // object region = 1
  double edge_mean = 0.0;          // border mean of the mean-thresholded raw PC1 map
  bool flipped = false;
};

std::size_t edge_pixel_count(std::size_t height, std::size_t width) noexcept;
double edge_mean(const BinaryMap& b);

/// Mean-threshold binarization plus border-polarity correction of a PC1 map.
Pc1Localization localize_pc1_map(const Heatmap& pc1_map);

Pc1Localization pc1_localize(const FeatureMapStack& f);

}  // namespace camwsol
