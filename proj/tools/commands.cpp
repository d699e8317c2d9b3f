#include "commands.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <json.hpp>

#include "camwsol/dictionary.hpp"
#include "camwsol/parallel.hpp"
#include "camwsol/pca.hpp"
#include "camwsol/tensor_io.hpp"
#include "svg_plot.hpp"

namespace camwsol::cli {
namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

DatasetManifest load_dataset(const CommonOptions& common) {
  if (common.manifest.empty()) fail(ErrorCode::InvalidArgument, "--manifest is required for this command");
  return load_manifest(common.manifest);
}

void prepare_output(const CommonOptions& common) {
  if (common.out.empty()) fail(ErrorCode::InvalidArgument, "--out is required");
  std::error_code ec;
  fs::create_directories(common.out, ec);
  if (ec || !fs::is_directory(common.out)) fail(ErrorCode::IoError, "cannot create output directory " + common.out.string());
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.close();
  if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

ClassifierWeights load_weights(const CommonOptions& common, const DatasetManifest& manifest) {
  const auto path = common.weights ? common.weights : manifest.weights_path;
  if (!path) fail(ErrorCode::SchemaError, "no classifier weights: pass --weights or set \"weights\" in the manifest");
  ClassifierWeights w = ClassifierWeights::from_tensor(load_tensor(*path));
  if (w.classes() != static_cast<std::size_t>(manifest.class_count)) {
    fail(ErrorCode::SchemaError, "weights have " + std::to_string(w.classes()) + " classes, manifest declares " +
                                     std::to_string(manifest.class_count));
  }
  return w;
}

std::vector<const ImageEntry*> select_entries(const DatasetManifest& manifest, const std::vector<std::string>& ids) {
  std::vector<const ImageEntry*> out;
  if (ids.empty()) {
    for (const auto& e : manifest.entries) out.push_back(&e);
    return out;
  }
  for (const auto& id : ids) {
    const ImageEntry* e = manifest.find(id);
    if (!e) fail(ErrorCode::InvalidArgument, "unknown image id '" + id + "'");
    out.push_back(e);
  }
  return out;
}

std::string dtype_name(DType d) { return d == DType::F32 ? "f32" : "f64"; }

std::string dtype_summary(const std::set<DType>& seen) {
  if (seen.empty()) return "none";
  if (seen.size() > 1) return "mixed";
  return dtype_name(*seen.begin());
}

std::string filter_name(const WeightFilter& f) {
  switch (f.mode) {
    case WeightFilter::Mode::All: return "all";
    case WeightFilter::Mode::PositiveOnly: return "positive_only";
    case WeightFilter::Mode::NegativeOnly: return "negative_only";
    case WeightFilter::Mode::Band: return "band(" + format_double(f.lo) + "," + format_double(f.hi) + "]";
  }
  return "all";
}

json error_json(const std::string& id, const Error& e) {
  return {{"id", id}, {"status", "error"}, {"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

// Unbiased draw in [0, bound) from the raw 64-bit stream, so sampling does
// not depend on the standard library's distribution implementations.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = rng();
  while (v >= limit) v = rng();
  return v % bound;
}

template <typename T>
void shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[draw_below(rng, i)]);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

int exit_code_for(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::TauOutOfRange:
      return 2;
    case ErrorCode::IoError:
    case ErrorCode::BadMagic:
    case ErrorCode::MalformedHeader:
    case ErrorCode::UnsupportedDtype:
    case ErrorCode::HeaderShapeMismatch:
    case ErrorCode::NonFiniteData:
    case ErrorCode::InvalidTensor:
      return 3;
    case ErrorCode::SchemaError:
    case ErrorCode::DanglingTensorRef:
    case ErrorCode::OverlappingSplits:
    case ErrorCode::BoxOutOfBounds:
    case ErrorCode::ClassOutOfRange:
    case ErrorCode::MissingHeatmap:
    case ErrorCode::EmptySplit:
      return 4;
    case ErrorCode::EmptySelection:
    case ErrorCode::DegenerateStack:
    case ErrorCode::AllZeroContribution:
    case ErrorCode::NegativeContribution:
    case ErrorCode::InsufficientSamples:
      return 5;
  }
  return 1;
}

CommandResult run_cam(const CommonOptions& common, const CamOptions& options) {
  const DatasetManifest manifest = load_dataset(common);
  const ClassifierWeights weights = load_weights(common, manifest);
  const auto entries = select_entries(manifest, options.image_ids);
  prepare_output(common);

  std::vector<std::optional<Heatmap>> maps(entries.size());
  std::vector<std::optional<Error>> errors(entries.size());
  std::vector<DType> dtypes(entries.size(), DType::F64);
  parallel_for(entries.size(), common.threads, [&](std::size_t i) {
    try {
      const Tensor t = load_tensor(entries[i]->featuremap_path);
      dtypes[i] = t.dtype;
      const FeatureMapStack f = FeatureMapStack::from_tensor(t);
      maps[i] = normalize(cam(f, weights, static_cast<std::size_t>(entries[i]->class_index), options.filter));
    } catch (const Error& e) {
      errors[i] = e;
    }
  });

  CommandResult result;
  json images = json::array();
  std::set<DType> seen;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string& id = entries[i]->image_id;
    if (errors[i]) {
      images.push_back(error_json(id, *errors[i]));
      ++result.failed;
      continue;
    }
    const std::string file = id + ".cam.npy";
    write_tensor(common.out / file, maps[i]->to_tensor(DType::F64));
    seen.insert(dtypes[i]);
    images.push_back({{"id", id}, {"status", "ok"}, {"output", file}, {"featuremap_dtype", dtype_name(dtypes[i])}});
    ++result.processed;
  }
  json index{{"command", "cam"},
             {"filter", filter_name(options.filter)},
             {"class_policy", "ground_truth"},
             {"featuremap_dtype", dtype_summary(seen)},
             {"heatmap_dtype", "f64"},
             {"normalized", true},
             {"images", images},
             {"failed", result.failed},
             {"warnings", result.warnings()}};
  write_json(common.out / "index.json", index);
  return result;
}

CommandResult run_pc1(const CommonOptions& common, const Pc1Options& options) {
  const DatasetManifest manifest = load_dataset(common);
  const auto entries = select_entries(manifest, options.image_ids);
  prepare_output(common);

  struct Pc1Out {
    Pc1Localization loc;
    std::vector<double> rates;
    DType dtype = DType::F64;
  };
  std::vector<std::optional<Pc1Out>> outs(entries.size());
  std::vector<std::optional<Error>> errors(entries.size());
  parallel_for(entries.size(), common.threads, [&](std::size_t i) {
    try {
      const Tensor t = load_tensor(entries[i]->featuremap_path);
      const PcaResult pca = pca_pc1(FeatureMapStack::from_tensor(t));
      outs[i] = Pc1Out{localize_pc1_map(pca.pc1_map), pca.contribution_rates, t.dtype};
    } catch (const Error& e) {
      errors[i] = e;
    }
  });

  CommandResult result;
  json images = json::array();
  std::set<DType> seen;
  std::string csv = "image_id,pc1_rate,edge_mean,flipped\n";
  std::vector<double> rate_sum(options.rate_components, 0.0);
  std::vector<std::size_t> rate_count(options.rate_components, 0);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string& id = entries[i]->image_id;
    if (errors[i]) {
      images.push_back(error_json(id, *errors[i]));
      ++result.failed;
      continue;
    }
    const Pc1Out& o = *outs[i];
    const std::string file = id + ".pc1.npy";
    write_tensor(common.out / file, o.loc.polarity_corrected_map.to_tensor(DType::F64));
    seen.insert(o.dtype);
    images.push_back({{"id", id},
                      {"status", "ok"},
                      {"output", file},
                      {"pc1_rate", o.rates.front()},
                      {"edge_mean", o.loc.edge_mean},
                      {"flipped", o.loc.flipped},
                      {"mask_pixels", o.loc.binary_map.count()}});
    csv += id + "," + format_double(o.rates.front()) + "," + format_double(o.loc.edge_mean) + "," +
           (o.loc.flipped ? "1" : "0") + "\n";
    for (std::size_t k = 0; k < options.rate_components && k < o.rates.size(); ++k) {
      rate_sum[k] += o.rates[k];
      ++rate_count[k];
    }
    ++result.processed;
  }

  std::string rates_csv = "component,mean_rate\n";
  Series curve{"mean over images", {}, {}, true};
  for (std::size_t k = 0; k < options.rate_components && rate_count[k]; ++k) {
    const double mean = rate_sum[k] / static_cast<double>(rate_count[k]);
    rates_csv += std::to_string(k + 1) + "," + format_double(mean) + "\n";
    curve.x.push_back(static_cast<double>(k + 1));
    curve.y.push_back(mean);
  }
  write_file(common.out / "pc1_rates.csv", csv);
  write_file(common.out / "contribution_rates.csv", rates_csv);
  write_file(common.out / "contribution_rates.svg",
             svg_plot("Principal component contribution rates", "component", "contribution rate", {curve}));
  json index{{"command", "pc1"},
             {"featuremap_dtype", dtype_summary(seen)},
             {"heatmap_dtype", "f64"},
             {"normalized", false},
             {"images", images},
             {"failed", result.failed},
             {"warnings", result.warnings()}};
  write_json(common.out / "index.json", index);
  return result;
}

CommandResult run_score(const CommonOptions& common, const ScoreOptions& options) {
  const DatasetManifest manifest = load_dataset(common);
  if (options.grid_points < 2) fail(ErrorCode::InvalidArgument, "tau grid needs at least 2 points");
  SweepConfig cfg;
  cfg.tau_grid = uniform_tau_grid(options.grid_points);
  cfg.validate();
  prepare_output(common);

  const bool honest = options.protocol == Protocol::Honest;
  std::map<std::string, Heatmap> heatmaps;
  std::set<DType> seen;
  auto load_split = [&](Split split) {
    for (const auto& id : manifest.split_ids(split)) {
      const fs::path p = options.heatmap_dir / (id + options.suffix);
      if (!fs::exists(p)) continue;
      const Tensor t = load_tensor(p);
      seen.insert(t.dtype);
      heatmaps.emplace(id, Heatmap::from_tensor(t));
    }
  };
  load_split(Split::Test);
  if (honest) load_split(Split::TrainFullsup);

  const auto test = make_samples(manifest, Split::Test, heatmaps);
  const auto fullsup = honest ? make_samples(manifest, Split::TrainFullsup, heatmaps) : std::vector<EvalSample>{};
  const ProtocolReport report = evaluate_protocol(fullsup, test, cfg, options.variant, options.protocol, common.threads);

  const BoxMode mode = options.variant == Variant::V1 ? BoxMode::LargestOnly : BoxMode::AllComponents;
  json per_image = json::array();
  for (const auto& s : test) per_image.push_back({{"id", s.image_id}, {"iou", best_iou(s, report.operating_tau, mode)}});
  auto summary = [](const ScoreReport& r) {
    return json{{"split", r.split},
                {"image_count", r.image_count},
                {"max_boxacc", r.max_boxacc},
                {"argmax_tau", r.argmax_tau}};
  };
  json j{{"command", "score"},
         {"variant", std::string(to_string(options.variant))},
         {"protocol", std::string(to_string(options.protocol))},
         {"optimistic", report.optimistic},
         {"heatmap_dtype", dtype_summary(seen)},
         {"tau_grid_points", cfg.tau_grid.size()},
         {"deltas", report.test.deltas},
         {"operating_tau", report.operating_tau},
         {"final_boxacc", report.final_boxacc},
         {"threshold_search", report.threshold_search ? summary(*report.threshold_search) : json(nullptr)},
         {"test", summary(report.test)},
         {"per_image_iou_at_operating_tau", per_image}};
  write_json(common.out / "report.json", j);

  std::string csv = "tau,fullsup,test\n";
  for (std::size_t k = 0; k < cfg.tau_grid.size(); ++k) {
    csv += format_double(cfg.tau_grid[k]) + ",";
    if (report.threshold_search) csv += format_double(report.threshold_search->boxacc_curve[k]);
    csv += "," + format_double(report.test.boxacc_curve[k]) + "\n";
  }
  write_file(common.out / "curve.csv", csv);

  std::vector<Series> series;
  if (report.threshold_search) series.push_back({"fullsup", cfg.tau_grid, report.threshold_search->boxacc_curve, true});
  series.push_back({"test", cfg.tau_grid, report.test.boxacc_curve, true});
  write_file(common.out / "curve.svg",
             svg_plot(std::string("BoxAcc ") + std::string(to_string(options.variant)), "tau", "BoxAcc", series));
  return {test.size() + fullsup.size(), 0};
}

CommandResult run_stats(const CommonOptions& common, const StatsOptions& options) {
  const DatasetManifest manifest = load_dataset(common);
  const ClassifierWeights weights = load_weights(common, manifest);
  std::vector<const ImageEntry*> entries;
  if (options.split) {
    entries = manifest.split_entries(*options.split);
  } else {
    for (const auto& e : manifest.entries) entries.push_back(&e);
  }
  prepare_output(common);

  std::vector<std::vector<ChannelStat>> rows(entries.size());
  parallel_for(entries.size(), common.threads, [&](std::size_t i) {
    const FeatureMapStack f = FeatureMapStack::from_tensor(load_tensor(entries[i]->featuremap_path));
    rows[i] = channel_stats(f, weights, static_cast<std::size_t>(entries[i]->class_index), options.raw_threshold);
  });

  std::string csv = "image_id,channel,weight,area,gap\n";
  Series area{"", {}, {}, false}, gap_points{"", {}, {}, false};
  for (std::size_t i = 0; i < entries.size(); ++i) {
    for (const auto& r : rows[i]) {
      csv += entries[i]->image_id + "," + std::to_string(r.channel) + "," + format_double(r.weight) + "," +
             format_double(r.activation_area) + "," + format_double(r.gap_value) + "\n";
      area.x.push_back(r.weight);
      area.y.push_back(r.activation_area);
      gap_points.x.push_back(r.weight);
      gap_points.y.push_back(r.gap_value);
    }
  }
  write_file(common.out / "channel_stats.csv", csv);
  write_file(common.out / "weight_vs_area.svg",
             svg_plot("Activation area vs weight (raw threshold " + format_double(options.raw_threshold) + ")",
                      "weight", "activation area", {area}));
  write_file(common.out / "weight_vs_gap.svg", svg_plot("GAP value vs weight", "weight", "GAP value", {gap_points}));
  return {entries.size(), 0};
}

CommandResult run_erf(const CommonOptions& common, const ErfOptions& options) {
  if (options.input.empty()) fail(ErrorCode::InvalidArgument, "--input is required");
  const ErfCurve curve = erf_curve(load_tensor(options.input), default_erf_thresholds(), options.region);
  prepare_output(common);

  std::string csv = "threshold,area_ratio\n";
  for (std::size_t k = 0; k < curve.thresholds.size(); ++k) {
    csv += format_double(curve.thresholds[k]) + "," + format_double(curve.area_ratios[k]) + "\n";
  }
  csv += "auc," + format_double(curve.auc) + "\n";
  write_file(common.out / "erf.csv", csv);
  const std::string region = options.region == ErfRegion::CenteredSquare ? "centered-square" : "top-pixels";
  json j{{"command", "erf"},
         {"region", region},
         {"auc", curve.auc},
         {"auc_normalization", "trapezoid over thresholds divided by threshold span"},
         {"thresholds", curve.thresholds},
         {"region_pixels", curve.region_pixels},
         {"area_ratios", curve.area_ratios}};
  write_json(common.out / "erf.json", j);
  write_file(common.out / "erf.svg", svg_plot("ERF area ratio (" + region + ")", "contribution threshold",
                                              "area ratio", {{"", curve.thresholds, curve.area_ratios, true}}));
  return {1, 0};
}

CommandResult run_complexity(const CommonOptions& common, const ComplexityOptions& options) {
  const DatasetManifest manifest = load_dataset(common);
  prepare_output(common);
  std::mt19937_64 rng(common.seed);

  // Every (image, channel) pair of a split, shuffled, truncated to `limit`.
  auto sample_pairs = [&](Split split, std::size_t limit) {
    std::vector<std::pair<const ImageEntry*, std::size_t>> pairs;
    for (const ImageEntry* e : manifest.split_entries(split)) {
      const TensorHeader h = read_tensor_header(e->featuremap_path);
      for (std::size_t c = 0; c < h.shape.front(); ++c) pairs.emplace_back(e, c);
    }
    shuffle(pairs, rng);
    if (pairs.size() > limit) pairs.resize(limit);
    return pairs;
  };
  auto gather = [&](const std::vector<std::pair<const ImageEntry*, std::size_t>>& pairs) {
    std::map<const ImageEntry*, FeatureMapStack> cache;
    std::vector<std::vector<double>> maps;
    for (const auto& [entry, channel] : pairs) {
      auto it = cache.find(entry);
      if (it == cache.end()) {
        it = cache.emplace(entry, FeatureMapStack::from_tensor(load_tensor(entry->featuremap_path))).first;
      }
      const auto ch = it->second.channel(channel);
      maps.emplace_back(ch.begin(), ch.end());
    }
    return maps;
  };
  const auto train = gather(sample_pairs(options.train_split, options.max_train_maps));
  const auto test = gather(sample_pairs(options.test_split, options.max_test_maps));
  const LearnOptions learn{options.sparsity, options.iterations, 1e-6};
  const ComplexityCurve curve = dictionary_complexity(train, test, options.components, learn);

  std::string csv = "K,mse\n";
  Series line{"test", {}, {}, true};
  for (std::size_t k = 0; k < curve.component_counts.size(); ++k) {
    csv += std::to_string(curve.component_counts[k]) + "," + format_double(curve.reconstruction_errors[k]) + "\n";
    line.x.push_back(static_cast<double>(curve.component_counts[k]));
    line.y.push_back(curve.reconstruction_errors[k]);
  }
  write_file(common.out / "complexity.csv", csv);
  write_file(common.out / "complexity.svg",
             svg_plot("Dictionary reconstruction error", "dictionary size K", "test MSE", {line}));
  json j{{"command", "complexity"},
         {"train_split", std::string(to_string(options.train_split))},
         {"test_split", std::string(to_string(options.test_split))},
         {"seed", common.seed},
         {"train_maps", train.size() - curve.dropped_train},
         {"test_maps", test.size() - curve.dropped_test},
         {"dropped_train", curve.dropped_train},
         {"dropped_test", curve.dropped_test},
         {"sparsity", curve.sparsity},
         {"max_iterations", options.iterations},
         {"component_counts", curve.component_counts},
         {"reconstruction_errors", curve.reconstruction_errors},
         {"training_errors", curve.training_errors},
         {"iterations", curve.iterations}};
  write_json(common.out / "complexity.json", j);
  return {train.size() + test.size(), 0};
}

}  // namespace camwsol::cli
