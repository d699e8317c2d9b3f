#include <CLI11.hpp>

#include <iostream>
#include <map>

#include "commands.hpp"

using namespace camwsol;
using namespace camwsol::cli;

namespace {

WeightFilter make_filter(const std::string& name, double lo, double hi) {
  if (name == "positive") return WeightFilter::positive_only();
  if (name == "negative") return WeightFilter::negative_only();
  if (name == "band") return WeightFilter::band(lo, hi);
  return WeightFilter::all();
}

std::optional<Split> split_option(const std::string& name) {
  if (name == "all") return std::nullopt;
  if (auto s = parse_split(name)) return s;
  fail(ErrorCode::InvalidArgument, "unknown split '" + name + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class activation and PC1 localization maps, MaxBoxAcc scoring and feature-map diagnostics"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  std::string weights;
  app.add_option("--manifest", common.manifest, "Dataset manifest (JSON)");
  app.add_option("--out", common.out, "Output directory")->required();
  app.add_option("--threads", common.threads, "Worker threads")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", common.seed, "Seed for sampled inputs");
  app.add_option("--weights", weights, "Classifier weight tensor (N, C); overrides the manifest");

  const std::vector<std::string> splits{"train_weaksup", "train_fullsup", "test"};

  CamOptions cam_opts;
  std::string filter = "all";
  double band_lo = 0.0, band_hi = 0.04;
  auto* cam_cmd = app.add_subcommand("cam", "Write one normalized CAM per image");
  cam_cmd->add_option("--filter", filter, "Channel selection by class weight")
      ->check(CLI::IsMember({"all", "positive", "negative", "band"}));
  cam_cmd->add_option("--band-lo", band_lo, "Band lower bound (exclusive)");
  cam_cmd->add_option("--band-hi", band_hi, "Band upper bound (inclusive)");
  cam_cmd->add_option("--images", cam_opts.image_ids, "Restrict to these image ids");

  Pc1Options pc1_opts;
  auto* pc1_cmd = app.add_subcommand("pc1", "Write one polarity-corrected PC1 map per image");
  pc1_cmd->add_option("--images", pc1_opts.image_ids, "Restrict to these image ids");
  pc1_cmd->add_option("--rate-components", pc1_opts.rate_components, "Leading contribution rates to report")
      ->check(CLI::PositiveNumber);

  ScoreOptions score_opts;
  std::string variant = "v1", protocol = "honest";
  auto* score_cmd = app.add_subcommand("score", "Score heatmaps with MaxBoxAcc");
  score_cmd->add_option("--heatmaps", score_opts.heatmap_dir, "Directory of heatmap tensors")->required();
  score_cmd->add_option("--suffix", score_opts.suffix, "Heatmap file suffix after the image id");
  score_cmd->add_option("--variant", variant, "Metric variant")->check(CLI::IsMember({"v1", "v2"}));
  score_cmd->add_option("--grid", score_opts.grid_points, "Number of tau grid points")
      ->check(CLI::IsMember({101, 1001}));
  score_cmd->add_option("--protocol", protocol, "Threshold selection protocol")
      ->check(CLI::IsMember({"honest", "optimistic"}));

  StatsOptions stats_opts;
  std::string stats_split = "all";
  auto* stats_cmd = app.add_subcommand("stats", "Per-channel weight, activation area and GAP value");
  stats_cmd->add_option("--raw-threshold", stats_opts.raw_threshold, "Activation threshold in raw units");
  stats_cmd->add_option("--split", stats_split, "Images to include")->check(CLI::IsMember({"all", "train_weaksup", "train_fullsup", "test"}));

  ErfOptions erf_opts;
  std::string region = "centered-square";
  auto* erf_cmd = app.add_subcommand("erf", "Effective receptive field area ratios and AUC");
  erf_cmd->add_option("--input", erf_opts.input, "Contribution map tensor (H, W) or (1, H, W)")->required();
  erf_cmd->add_option("--region", region, "Region growth rule")->check(CLI::IsMember({"centered-square", "top-pixels"}));

  ComplexityOptions cx_opts;
  std::string train_split = "train_weaksup", test_split = "test";
  auto* cx_cmd = app.add_subcommand("complexity", "Dictionary-learning reconstruction error of channel maps");
  cx_cmd->add_option("--components", cx_opts.components, "Dictionary sizes, ascending")->delimiter(',');
  cx_cmd->add_option("--sparsity", cx_opts.sparsity, "Nonzero coefficients per map")->check(CLI::PositiveNumber);
  cx_cmd->add_option("--iters", cx_opts.iterations, "Maximum learning iterations")->check(CLI::PositiveNumber);
  cx_cmd->add_option("--train-split", train_split, "Split providing training maps")->check(CLI::IsMember(splits));
  cx_cmd->add_option("--test-split", test_split, "Split providing held-out maps")->check(CLI::IsMember(splits));
  cx_cmd->add_option("--max-train-maps", cx_opts.max_train_maps, "Sampled training channel maps");
  cx_cmd->add_option("--max-test-maps", cx_opts.max_test_maps, "Sampled held-out channel maps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!weights.empty()) common.weights = weights;
    CommandResult result;
    if (*cam_cmd) {
      cam_opts.filter = make_filter(filter, band_lo, band_hi);
      result = run_cam(common, cam_opts);
    } else if (*pc1_cmd) {
      result = run_pc1(common, pc1_opts);
    } else if (*score_cmd) {
      score_opts.variant = variant == "v2" ? Variant::V2 : Variant::V1;
      score_opts.protocol = protocol == "optimistic" ? Protocol::Optimistic : Protocol::Honest;
      result = run_score(common, score_opts);
    } else if (*stats_cmd) {
      stats_opts.split = split_option(stats_split);
      result = run_stats(common, stats_opts);
    } else if (*erf_cmd) {
      erf_opts.region = region == "top-pixels" ? ErfRegion::TopPixels : ErfRegion::CenteredSquare;
      result = run_erf(common, erf_opts);
    } else if (*cx_cmd) {
      cx_opts.train_split = *parse_split(train_split);
      cx_opts.test_split = *parse_split(test_split);
      result = run_complexity(common, cx_opts);
    }
    if (result.warnings()) std::cerr << "warning: " << result.failed << " image(s) failed; see index.json\n";
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
