#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "camwsol/box.hpp"

namespace camwsol {

enum class Split { TrainWeaksup, TrainFullsup, Test };

std::string_view to_string(Split split) noexcept;
std::optional<Split> parse_split(std::string_view name) noexcept;

struct ImageEntry {
  std::string image_id;
  int class_index = 0;
  ImageSize image_size;
  std::string featuremap;               // as written in the manifest
  std::filesystem::path featuremap_path;  // resolved against the manifest directory
  std::vector<Box> gt_boxes;
};

/// A validated dataset description. Construct through load_manifest or
/// parse_manifest; both check every invariant before returning.
struct DatasetManifest {
  int class_count = 0;
  std::vector<ImageEntry> entries;
  std::vector<std::string> train_weaksup;
  std::vector<std::string> train_fullsup;
  std::vector<std::string> test;
  // Optional (N, C) classifier weight tensor shared by every image.
  std::optional<std::filesystem::path> weights_path;
  std::filesystem::path base_dir;

  const ImageEntry* find(std::string_view image_id) const noexcept;
  const std::vector<std::string>& split_ids(Split split) const noexcept;
  /// Entries of a split in the order listed by the manifest.
  std::vector<const ImageEntry*> split_entries(Split split) const;
};

DatasetManifest load_manifest(const std::filesystem::path& path);

/// `base_dir` resolves relative tensor paths. With `check_tensors` false the
/// referenced files are not touched (useful for in-memory validation).
DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                               bool check_tensors = true);

}  // namespace camwsol
