#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "camwsol/analysis.hpp"
#include "camwsol/cam.hpp"
#include "camwsol/error.hpp"
#include "camwsol/manifest.hpp"
#include "camwsol/scoring.hpp"

namespace camwsol::cli {

struct CommonOptions {
  std::filesystem::path manifest;
  std::filesystem::path out;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  std::optional<std::filesystem::path> weights;  // overrides the manifest entry
};

struct CamOptions {
  WeightFilter filter;
  std::vector<std::string> image_ids;  // empty: every image in the manifest
};

struct Pc1Options {
  std::vector<std::string> image_ids;
  std::size_t rate_components = 10;  // leading contribution rates to average
};

struct ScoreOptions {
  std::filesystem::path heatmap_dir;
  std::string suffix = ".cam.npy";
  Variant variant = Variant::V1;
  Protocol protocol = Protocol::Honest;
  std::size_t grid_points = 101;
};

struct StatsOptions {
  double raw_threshold = 10.0;
  std::optional<Split> split;  // every image when unset
};

struct ErfOptions {
  std::filesystem::path input;
  ErfRegion region = ErfRegion::CenteredSquare;
};

struct ComplexityOptions {
  std::vector<std::size_t> components{2, 4, 8, 16, 32};
  std::size_t sparsity = 5;
  int iterations = 20;
  Split train_split = Split::TrainWeaksup;
  Split test_split = Split::Test;
  std::size_t max_train_maps = 1000;
  std::size_t max_test_maps = 500;
};

/// Outcome of a command that completed. Fatal problems throw camwsol::Error.
struct CommandResult {
  std::size_t processed = 0;
  std::size_t failed = 0;  // per-image failures recorded in the index
  bool warnings() const noexcept { return failed > 0; }
};

CommandResult run_cam(const CommonOptions& common, const CamOptions& options);
CommandResult run_pc1(const CommonOptions& common, const Pc1Options& options);
CommandResult run_score(const CommonOptions& common, const ScoreOptions& options);
CommandResult run_stats(const CommonOptions& common, const StatsOptions& options);
CommandResult run_erf(const CommonOptions& common, const ErfOptions& options);
CommandResult run_complexity(const CommonOptions& common, const ComplexityOptions& options);

/// 2 bad arguments, 3 unreadable or malformed tensors, 4 dataset problems,
/// 5 computations that cannot proceed on the given data.
int exit_code_for(ErrorCode code) noexcept;

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace camwsol::cli
