#include "camwsol/dictionary.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "camwsol/error.hpp"

namespace camwsol {
namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Eigen::MatrixXd as_matrix(const Dictionary& d) {
  Eigen::MatrixXd m(d.dimension(), d.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    m.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::VectorXd>(d.atom(k).data(), d.atom(k).size());
  }
  return m;
}

SparseCode encode(const Eigen::MatrixXd& dm, const Eigen::Ref<const Eigen::VectorXd>& x, std::size_t sparsity,
                  double tolerance) {
  SparseCode code;
  const double xnorm = x.norm();
  Eigen::VectorXd residual = x;
  const std::size_t limit = std::min<std::size_t>(sparsity, static_cast<std::size_t>(dm.cols()));
  std::vector<bool> used(static_cast<std::size_t>(dm.cols()), false);
  Eigen::VectorXd coef;
  while (code.atoms.size() < limit && residual.norm() > tolerance * xnorm) {
    const Eigen::VectorXd corr = dm.transpose() * residual;
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index k = 0; k < corr.size(); ++k) {
      if (!used[static_cast<std::size_t>(k)] && std::abs(corr(k)) > best_abs) {
        best = k;
        best_abs = std::abs(corr(k));
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    code.atoms.push_back(static_cast<std::size_t>(best));
    Eigen::MatrixXd sub(dm.rows(), static_cast<Eigen::Index>(code.atoms.size()));
    for (std::size_t i = 0; i < code.atoms.size(); ++i) sub.col(static_cast<Eigen::Index>(i)) = dm.col(static_cast<Eigen::Index>(code.atoms[i]));
    coef = sub.colPivHouseholderQr().solve(x);
    residual = x - sub * coef;
  }
  code.coefficients.assign(coef.data(), coef.data() + coef.size());
  code.residual_norm = residual.norm();
  return code;
}

// MOD step: atoms <- X A^T (A A^T)^+ over the atoms that some code uses.
Dictionary mod_update(const Dictionary& d, const Eigen::MatrixXd& x, const std::vector<SparseCode>& codes) {
  const auto k_count = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k_count, x.cols());
  for (std::size_t m = 0; m < codes.size(); ++m) {
    for (std::size_t i = 0; i < codes[m].atoms.size(); ++i) {
      a(static_cast<Eigen::Index>(codes[m].atoms[i]), static_cast<Eigen::Index>(m)) = codes[m].coefficients[i];
    }
  }
  std::vector<Eigen::Index> active;
  for (Eigen::Index k = 0; k < k_count; ++k) {
    if (a.row(k).squaredNorm() > 0.0) active.push_back(k);
  }
  auto atoms = d.atoms();
  if (active.empty()) return d;
  Eigen::MatrixXd au(static_cast<Eigen::Index>(active.size()), x.cols());
  for (std::size_t i = 0; i < active.size(); ++i) au.row(static_cast<Eigen::Index>(i)) = a.row(active[i]);
  const Eigen::MatrixXd gram = au * au.transpose();
  const Eigen::MatrixXd rhs = au * x.transpose();  // k x D
  const Eigen::MatrixXd updated = gram.completeOrthogonalDecomposition().solve(rhs);
  for (std::size_t i = 0; i < active.size(); ++i) {
    const Eigen::VectorXd atom = updated.row(static_cast<Eigen::Index>(i)).transpose();
    const double n = atom.norm();
    if (!(n > 0.0) || !std::isfinite(n)) continue;
    auto& dst = atoms[static_cast<std::size_t>(active[i])];
    for (Eigen::Index r = 0; r < atom.size(); ++r) dst[static_cast<std::size_t>(r)] = atom(r) / n;
  }
  return Dictionary(std::move(atoms));
}

std::vector<std::vector<double>> normalized_nonzero(const std::vector<std::vector<double>>& maps, std::size_t& dropped) {
  std::vector<std::vector<double>> out;
  dropped = 0;
  for (const auto& m : maps) {
    const double n = norm2(m);
    if (!(n > 0.0)) {
      ++dropped;
      continue;
    }
    auto& v = out.emplace_back(m);
    for (double& x : v) x /= n;
  }
  return out;
}

Eigen::MatrixXd columns(const std::vector<std::vector<double>>& maps) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(maps.front().size()), static_cast<Eigen::Index>(maps.size()));
  for (std::size_t m = 0; m < maps.size(); ++m) {
    x.col(static_cast<Eigen::Index>(m)) = Eigen::Map<const Eigen::VectorXd>(maps[m].data(), static_cast<Eigen::Index>(maps[m].size()));
  }
  return x;
}

double mse_of(const Eigen::MatrixXd& dm, const Eigen::MatrixXd& x, std::size_t sparsity, std::vector<SparseCode>* codes) {
  double sq = 0.0;
  if (codes) codes->clear();
  for (Eigen::Index m = 0; m < x.cols(); ++m) {
    SparseCode c = encode(dm, x.col(m), sparsity, 1e-12);
    sq += c.residual_norm * c.residual_norm;
    if (codes) codes->push_back(std::move(c));
  }
  return sq / static_cast<double>(x.rows() * x.cols());
}

}  // namespace

Dictionary::Dictionary(std::vector<std::vector<double>> atoms) : atoms_(std::move(atoms)) {
  for (auto& a : atoms_) {
    if (a.size() != atoms_.front().size() || a.empty()) fail(ErrorCode::InvalidArgument, "dictionary atoms differ in length");
    const double n = norm2(a);
    if (!(n > 0.0)) fail(ErrorCode::InvalidArgument, "dictionary atom has zero norm");
    for (double& x : a) x /= n;
  }
}

SparseCode omp_encode(const Dictionary& d, std::span<const double> x, std::size_t sparsity, double tolerance) {
  if (d.size() == 0) fail(ErrorCode::InvalidArgument, "empty dictionary");
  if (x.size() != d.dimension()) fail(ErrorCode::InvalidArgument, "signal length differs from atom length");
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return encode(as_matrix(d), xv, sparsity, tolerance);
}

std::vector<double> reconstruct(const Dictionary& d, const SparseCode& code) {
  std::vector<double> out(d.dimension(), 0.0);
  for (std::size_t i = 0; i < code.atoms.size(); ++i) {
    const auto& atom = d.atom(code.atoms[i]);
    for (std::size_t r = 0; r < out.size(); ++r) out[r] += code.coefficients[i] * atom[r];
  }
  return out;
}

double reconstruction_mse(const Dictionary& d, const std::vector<std::vector<double>>& maps, std::size_t sparsity) {
  if (maps.empty()) fail(ErrorCode::InsufficientSamples, "no maps to reconstruct");
  for (const auto& m : maps) {
    if (m.size() != d.dimension()) fail(ErrorCode::InvalidArgument, "map length differs from atom length");
  }
  return mse_of(as_matrix(d), columns(maps), sparsity, nullptr);
}

LearnResult learn_dictionary(const std::vector<std::vector<double>>& training, const Dictionary& initial,
                             const LearnOptions& options) {
  if (training.empty()) fail(ErrorCode::InsufficientSamples, "no training maps");
  const Eigen::MatrixXd x = columns(training);
  LearnResult r{initial, 0.0, 0};
  std::vector<SparseCode> codes;
  r.training_mse = mse_of(as_matrix(r.dictionary), x, options.sparsity, &codes);
  for (int it = 0; it < options.max_iterations; ++it) {
    Dictionary next = mod_update(r.dictionary, x, codes);
    std::vector<SparseCode> next_codes;
    const double err = mse_of(as_matrix(next), x, options.sparsity, &next_codes);
    if (err > r.training_mse) break;
    const double change = r.training_mse > 0.0 ? (r.training_mse - err) / r.training_mse : 0.0;
    r.dictionary = std::move(next);
    codes = std::move(next_codes);
    r.training_mse = err;
    r.iterations = it + 1;
    if (change < options.tolerance) break;
  }
  return r;
}

ComplexityCurve dictionary_complexity(const std::vector<std::vector<double>>& train_maps,
                                      const std::vector<std::vector<double>>& test_maps,
                                      std::span<const std::size_t> component_counts, const LearnOptions& options) {
  ComplexityCurve curve;
  curve.sparsity = options.sparsity;
  if (options.sparsity == 0) fail(ErrorCode::InvalidArgument, "sparsity must be >= 1");
  if (component_counts.empty()) fail(ErrorCode::InvalidArgument, "no component counts");
  const auto train = normalized_nonzero(train_maps, curve.dropped_train);
  const auto test = normalized_nonzero(test_maps, curve.dropped_test);
  if (train.empty() || test.empty()) fail(ErrorCode::InsufficientSamples, "need nonzero training and test maps");
  for (const auto* set : {&train, &test}) {
    for (const auto& m : *set) {
      if (m.size() != train.front().size()) fail(ErrorCode::InvalidArgument, "maps differ in length");
    }
  }
  for (std::size_t i = 0; i < component_counts.size(); ++i) {
    if (component_counts[i] == 0 || (i && component_counts[i] <= component_counts[i - 1])) {
      fail(ErrorCode::InvalidArgument, "component counts must be positive and ascending");
    }
  }
  if (component_counts.back() > train.size()) {
    fail(ErrorCode::InsufficientSamples, "component count " + std::to_string(component_counts.back()) +
                                             " exceeds " + std::to_string(train.size()) + " training maps");
  }

  std::vector<std::vector<double>> atoms;
  for (std::size_t k : component_counts) {
    for (std::size_t i = atoms.size(); i < k; ++i) atoms.push_back(train[i]);
    LearnResult learned = learn_dictionary(train, Dictionary(atoms), options);
    atoms = learned.dictionary.atoms();
    curve.component_counts.push_back(k);
    curve.training_errors.push_back(learned.training_mse);
    curve.iterations.push_back(learned.iterations);
    curve.reconstruction_errors.push_back(reconstruction_mse(learned.dictionary, test, options.sparsity));
  }
  return curve;
}

}  // namespace camwsol
