#include "camwsol/scoring.hpp"

#include <algorithm>
#include <string>

#include "camwsol/error.hpp"
#include "camwsol/parallel.hpp"

namespace camwsol {
namespace {

struct Curves {
  std::vector<double> mean;
  std::vector<std::vector<double>> per_delta;
};

// Image-level success is counted in integers; every curve value is a fixed
// sequence of divisions, so results do not depend on the worker count.
Curves sweep(std::span<const EvalSample> samples, std::span<const double> grid, BoxMode mode,
             std::span<const double> deltas, unsigned threads) {
  std::vector<std::vector<double>> ious(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    auto& row = ious[i];
    row.resize(grid.size());
    for (std::size_t t = 0; t < grid.size(); ++t) row[t] = best_iou(samples[i], grid[t], mode);
  });

  Curves c;
  c.mean.assign(grid.size(), 0.0);
  c.per_delta.assign(deltas.size(), std::vector<double>(grid.size(), 0.0));
  const double n = static_cast<double>(samples.size());
  for (std::size_t t = 0; t < grid.size(); ++t) {
    double acc = 0.0;
    for (std::size_t d = 0; d < deltas.size(); ++d) {
      std::size_t hits = 0;
      for (const auto& row : ious) hits += row[t] >= deltas[d] ? 1 : 0;
      c.per_delta[d][t] = static_cast<double>(hits) / n;
      acc += c.per_delta[d][t];
    }
    c.mean[t] = acc / static_cast<double>(deltas.size());
  }
  return c;
}

BoxMode mode_of(Variant v) { return v == Variant::V1 ? BoxMode::LargestOnly : BoxMode::AllComponents; }

std::vector<double> deltas_of(const SweepConfig& cfg, Variant v) {
  return v == Variant::V1 ? std::vector<double>{cfg.delta_v1} : cfg.delta_v2_set;
}

void require_samples(std::span<const EvalSample> samples, const char* what) {
  if (samples.empty()) fail(ErrorCode::EmptySplit, std::string(what) + " split has no images");
}

}  // namespace

std::string_view to_string(Variant v) noexcept { return v == Variant::V1 ? "v1" : "v2"; }

std::string_view to_string(Protocol p) noexcept { return p == Protocol::Honest ? "honest" : "optimistic"; }

std::vector<double> uniform_tau_grid(std::size_t points) {
  if (points < 2) fail(ErrorCode::InvalidArgument, "a tau grid needs at least 2 points");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
  return grid;
}

void SweepConfig::validate() const {
  if (tau_grid.empty()) fail(ErrorCode::InvalidArgument, "empty tau grid");
  for (std::size_t i = 0; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] >= 0.0 && tau_grid[i] <= 1.0)) fail(ErrorCode::InvalidArgument, "tau grid leaves [0, 1]");
    if (i && !(tau_grid[i] > tau_grid[i - 1])) fail(ErrorCode::InvalidArgument, "tau grid not strictly ascending");
  }
  auto check_delta = [](double d) {
    if (!(d > 0.0 && d < 1.0)) fail(ErrorCode::InvalidArgument, "IoU cutoff outside (0, 1)");
  };
  check_delta(delta_v1);
  if (delta_v2_set.empty()) fail(ErrorCode::InvalidArgument, "empty V2 cutoff set");
  for (double d : delta_v2_set) check_delta(d);
}

std::vector<EvalSample> make_samples(const DatasetManifest& manifest, Split split,
                                     const std::map<std::string, Heatmap>& heatmaps) {
  std::vector<EvalSample> out;
  for (const ImageEntry* e : manifest.split_entries(split)) {
    const auto it = heatmaps.find(e->image_id);
    if (it == heatmaps.end() || it->second.values.empty()) {
      fail(ErrorCode::MissingHeatmap, "no heatmap for image '" + e->image_id + "'");
    }
    out.push_back({e->image_id, normalize(it->second), e->image_size, e->gt_boxes});
  }
  return out;
}

double best_iou(const EvalSample& sample, double tau, BoxMode mode) {
  const BoxSet predicted = localize(sample.heatmap, tau, mode, sample.image_size);
  double best = 0.0;
  for (const Box& p : predicted.boxes()) {
    for (const Box& g : sample.gt_boxes) best = std::max(best, iou(p, g));
  }
  return best;
}

std::vector<double> boxacc_curve(std::span<const EvalSample> samples, std::span<const double> tau_grid,
                                 BoxMode mode, std::span<const double> deltas, unsigned threads) {
  require_samples(samples, "evaluated");
  if (deltas.empty()) fail(ErrorCode::InvalidArgument, "no IoU cutoffs");
  return sweep(samples, tau_grid, mode, deltas, threads).mean;
}

double boxacc_v1(std::span<const EvalSample> samples, double tau, double delta) {
  const double grid[] = {tau};
  const double deltas[] = {delta};
  return boxacc_curve(samples, grid, BoxMode::LargestOnly, deltas).front();
}

double boxacc_v2(std::span<const EvalSample> samples, double tau, std::span<const double> deltas) {
  const double grid[] = {tau};
  return boxacc_curve(samples, grid, BoxMode::AllComponents, deltas).front();
}

ScoreReport max_boxacc(std::span<const EvalSample> samples, const SweepConfig& cfg, Variant variant,
                       unsigned threads, std::string split_name) {
  cfg.validate();
  require_samples(samples, split_name.empty() ? "evaluated" : split_name.c_str());
  ScoreReport r;
  r.variant = variant;
  r.split = std::move(split_name);
  r.tau_grid = cfg.tau_grid;
  r.deltas = deltas_of(cfg, variant);
  r.image_count = samples.size();
  Curves c = sweep(samples, r.tau_grid, mode_of(variant), r.deltas, threads);
  r.boxacc_curve = std::move(c.mean);
  r.per_delta_curves = std::move(c.per_delta);

  std::size_t best = 0;
  for (std::size_t t = 1; t < r.boxacc_curve.size(); ++t) {
    if (r.boxacc_curve[t] > r.boxacc_curve[best]) best = t;
  }
  r.max_boxacc = r.boxacc_curve[best];
  r.argmax_tau = r.tau_grid[best];
  r.per_image_iou.reserve(samples.size());
  for (const auto& s : samples) r.per_image_iou.emplace_back(s.image_id, best_iou(s, r.argmax_tau, mode_of(variant)));
  return r;
}

double select_operating_threshold(std::span<const EvalSample> fullsup, const SweepConfig& cfg, Variant variant,
                                  unsigned threads) {
  require_samples(fullsup, "fullsup");
  return max_boxacc(fullsup, cfg, variant, threads, "train_fullsup").argmax_tau;
}

double fixed_threshold_boxacc(std::span<const EvalSample> test, double tau, const SweepConfig& cfg,
                              Variant variant) {
  require_samples(test, "test");
  const double grid[] = {tau};
  const auto deltas = deltas_of(cfg, variant);
  return boxacc_curve(test, grid, mode_of(variant), deltas).front();
}

ProtocolReport evaluate_protocol(std::span<const EvalSample> fullsup, std::span<const EvalSample> test,
                                 const SweepConfig& cfg, Variant variant, Protocol protocol, unsigned threads) {
  ProtocolReport r;
  r.requested = protocol;
  r.test = max_boxacc(test, cfg, variant, threads, "test");
  if (protocol == Protocol::Honest && !fullsup.empty()) {
    r.threshold_search = max_boxacc(fullsup, cfg, variant, threads, "train_fullsup");
    r.operating_tau = r.threshold_search->argmax_tau;
    r.final_boxacc = fixed_threshold_boxacc(test, r.operating_tau, cfg, variant);
  } else {
    r.optimistic = true;
    r.operating_tau = r.test.argmax_tau;
    r.final_boxacc = r.test.max_boxacc;
  }
  return r;
}

}  // namespace camwsol
