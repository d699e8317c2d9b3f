#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "camwsol/box.hpp"
#include "camwsol/cam.hpp"
#include "camwsol/localization.hpp"
#include "camwsol/manifest.hpp"

namespace camwsol {

enum class Variant { V1, V2 };
enum class Protocol { Honest, Optimistic };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(Protocol p) noexcept;

/// `points` evenly spaced thresholds i / (points - 1) covering [0, 1].
std::vector<double> uniform_tau_grid(std::size_t points);

struct SweepConfig {
  std::vector<double> tau_grid = uniform_tau_grid(101);
  double delta_v1 = 0.5;
  std::vector<double> delta_v2_set{0.3, 0.5, 0.7};

  /// Throws InvalidArgument unless the grid is strictly ascending inside
  /// [0, 1] and every delta lies in (0, 1).
  void validate() const;
};

/// One scored image: a normalized heatmap with its ground truth.
struct EvalSample {
  std::string image_id;
  Heatmap heatmap;
  ImageSize image_size;
  std::vector<Box> gt_boxes;
};

/// Pairs each image of `split` with its heatmap (normalizing it). Throws
/// MissingHeatmap when an image has none.
std::vector<EvalSample> make_samples(const DatasetManifest& manifest, Split split,
                                     const std::map<std::string, Heatmap>& heatmaps);

/// Best IoU between the predicted boxes at `tau` and any gt box; 0 when the
/// prediction is empty.
double best_iou(const EvalSample& sample, double tau, BoxMode mode);

/// BoxAcc at each tau: mean over `deltas` of the fraction of images whose
/// best IoU reaches delta (inclusive).
std::vector<double> boxacc_curve(std::span<const EvalSample> samples, std::span<const double> tau_grid,
                                 BoxMode mode, std::span<const double> deltas, unsigned threads = 1);

double boxacc_v1(std::span<const EvalSample> samples, double tau, double delta = 0.5);
double boxacc_v2(std::span<const EvalSample> samples, double tau, std::span<const double> deltas);

struct ScoreReport {
  Variant variant = Variant::V1;
  std::string split;
  std::vector<double> tau_grid;
  std::vector<double> deltas;
  std::vector<double> boxacc_curve;
  std::vector<std::vector<double>> per_delta_curves;  // one per delta
  double max_boxacc = 0.0;
  double argmax_tau = 0.0;
  std::size_t image_count = 0;
  /// Best IoU of every image at argmax_tau, in sample order.
  std::vector<std::pair<std::string, double>> per_image_iou;
};

ScoreReport max_boxacc(std::span<const EvalSample> samples, const SweepConfig& cfg, Variant variant,
                       unsigned threads = 1, std::string split_name = {});

/// Smallest tau maximizing the BoxAcc curve. Throws EmptySplit.
double select_operating_threshold(std::span<const EvalSample> fullsup, const SweepConfig& cfg, Variant variant,
                                  unsigned threads = 1);

double fixed_threshold_boxacc(std::span<const EvalSample> test, double tau, const SweepConfig& cfg,
                              Variant variant);

struct ProtocolReport {
  Protocol requested = Protocol::Honest;
  bool optimistic = false;  // threshold chosen on the evaluated split itself
  double operating_tau = 0.0;
  double final_boxacc = 0.0;  // BoxAcc on test at operating_tau
  std::optional<ScoreReport> threshold_search;  // fullsup curve (honest only)
  ScoreReport test;
};

/// Honest: tau from `fullsup`, final number on `test`. Falls back to the
/// optimistic protocol when `fullsup` is empty.
ProtocolReport evaluate_protocol(std::span<const EvalSample> fullsup, std::span<const EvalSample> test,
                                 const SweepConfig& cfg, Variant variant, Protocol protocol,
                                 unsigned threads = 1);

}  // namespace camwsol
