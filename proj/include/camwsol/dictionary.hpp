#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace camwsol {

/// Column dictionary: every atom has the same length and unit L2 norm.
class Dictionary {
 public:
  Dictionary() = default;
  /// Atoms are L2-normalized on construction; zero atoms are rejected.
  explicit Dictionary(std::vector<std::vector<double>> atoms);

  std::size_t size() const noexcept { return atoms_.size(); }
  std::size_t dimension() const noexcept { return atoms_.empty() ? 0 : atoms_.front().size(); }
  const std::vector<double>& atom(std::size_t k) const noexcept { return atoms_[k]; }
  const std::vector<std::vector<double>>& atoms() const noexcept { return atoms_; }

 private:
  std::vector<std::vector<double>> atoms_;
};

struct SparseCode {
  std::vector<std::size_t> atoms;  // in selection order
  std::vector<double> coefficients;
  double residual_norm = 0.0;
};

/// Orthogonal matching pursuit: greedily selects up to `sparsity` atoms,
/// refitting all selected coefficients by least squares after each pick.
/// Stops early once the residual falls below `tolerance * |x|`.
SparseCode omp_encode(const Dictionary& d, std::span<const double> x, std::size_t sparsity,
                      double tolerance = 1e-12);

std::vector<double> reconstruct(const Dictionary& d, const SparseCode& code);

/// Mean over maps and elements of the squared OMP reconstruction residual.
double reconstruction_mse(const Dictionary& d, const std::vector<std::vector<double>>& maps, std::size_t sparsity);

struct LearnOptions {
  std::size_t sparsity = 5;
  int max_iterations = 20;
  double tolerance = 1e-6;  // relative change of the training error
};

struct LearnResult {
  Dictionary dictionary;
  double training_mse = 0.0;
  int iterations = 0;
};

/// Alternates OMP coding with a least-squares (MOD) atom update starting
/// from `initial`. An update that raises the training error is rejected and
/// ends the loop.
LearnResult learn_dictionary(const std::vector<std::vector<double>>& training, const Dictionary& initial,
                             const LearnOptions& options);

struct ComplexityCurve {
  std::vector<std::size_t> component_counts;
  std::vector<double> reconstruction_errors;  // test-set MSE per count
  std::vector<double> training_errors;
  std::vector<int> iterations;
  std::size_t sparsity = 0;
  std::size_t dropped_train = 0;  // all-zero maps that cannot be normalized
  std::size_t dropped_test = 0;
};

/// Learns one dictionary per component count (ascending) and reports the
/// reconstruction error on held-out maps. Maps are L2-normalized; all-zero
/// maps are dropped. The dictionary for the first count starts from the
/// first K training maps; each larger one starts from the previous learned
/// dictionary plus the next training maps. Throws InsufficientSamples.
ComplexityCurve dictionary_complexity(const std::vector<std::vector<double>>& train_maps,
                                      const std::vector<std::vector<double>>& test_maps,
                                      std::span<const std::size_t> component_counts, const LearnOptions& options);

}  // namespace camwsol
