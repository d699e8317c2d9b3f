#include "camwsol/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "camwsol/error.hpp"
#include "camwsol/tensor_io.hpp"

namespace camwsol {
namespace {

using nlohmann::json;

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) fail(ErrorCode::SchemaError, where + ": missing '" + key + "'");
  return obj.at(key);
}

std::int64_t integer(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_integer()) fail(ErrorCode::SchemaError, where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<std::string> id_list(const json& splits, const char* key) {
  std::vector<std::string> ids;
  if (!splits.contains(key)) return ids;
  const json& arr = splits.at(key);
  if (!arr.is_array()) fail(ErrorCode::SchemaError, std::string("splits.") + key + " must be an array");
  for (const json& v : arr) {
    if (!v.is_string()) fail(ErrorCode::SchemaError, std::string("splits.") + key + " holds a non-string id");
    ids.push_back(v.get<std::string>());
  }
  return ids;
}

Box parse_box(const json& j, const std::string& where) {
  Box b{integer(j, "x_min", where), integer(j, "y_min", where), integer(j, "x_max", where),
        integer(j, "y_max", where)};
  if (!b.valid()) fail(ErrorCode::SchemaError, where + ": box must satisfy min < max on both axes");
  return b;
}

ImageEntry parse_entry(const json& j, const std::filesystem::path& base_dir, std::size_t index) {
  const std::string where = "images[" + std::to_string(index) + "]";
  if (!j.is_object()) fail(ErrorCode::SchemaError, where + " is not an object");
  ImageEntry e;
  const json& id = member(j, "id", where);
  if (!id.is_string() || id.get<std::string>().empty()) fail(ErrorCode::SchemaError, where + ": id must be a non-empty string");
  e.image_id = id.get<std::string>();
  const std::string at = "image '" + e.image_id + "'";
  e.class_index = static_cast<int>(integer(j, "class_index", at));
  e.image_size = {integer(j, "width", at), integer(j, "height", at)};
  if (e.image_size.width < 1 || e.image_size.height < 1) fail(ErrorCode::SchemaError, at + ": width/height must be >= 1");
  const json& fm = member(j, "featuremap", at);
  if (!fm.is_string()) fail(ErrorCode::SchemaError, at + ": featuremap must be a path string");
  e.featuremap = fm.get<std::string>();
  e.featuremap_path = base_dir / e.featuremap;
  const json& boxes = member(j, "gt_boxes", at);
  if (!boxes.is_array()) fail(ErrorCode::SchemaError, at + ": gt_boxes must be an array");
  for (const json& b : boxes) e.gt_boxes.push_back(parse_box(b, at));
  return e;
}

}  // namespace

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::TrainWeaksup: return "train_weaksup";
    case Split::TrainFullsup: return "train_fullsup";
    case Split::Test: return "test";
  }
  return "unknown";
}

std::optional<Split> parse_split(std::string_view name) noexcept {
  if (name == "train_weaksup") return Split::TrainWeaksup;
  if (name == "train_fullsup") return Split::TrainFullsup;
  if (name == "test") return Split::Test;
  return std::nullopt;
}

const ImageEntry* DatasetManifest::find(std::string_view image_id) const noexcept {
  for (const auto& e : entries) {
    if (e.image_id == image_id) return &e;
  }
  return nullptr;
}

const std::vector<std::string>& DatasetManifest::split_ids(Split split) const noexcept {
  switch (split) {
    case Split::TrainWeaksup: return train_weaksup;
    case Split::TrainFullsup: return train_fullsup;
    case Split::Test: break;
  }
  return test;
}

std::vector<const ImageEntry*> DatasetManifest::split_entries(Split split) const {
  std::unordered_map<std::string_view, const ImageEntry*> by_id;
  for (const auto& e : entries) by_id.emplace(e.image_id, &e);
  std::vector<const ImageEntry*> out;
  for (const auto& id : split_ids(split)) out.push_back(by_id.at(id));
  return out;
}

DatasetManifest parse_manifest(std::string_view json_text, const std::filesystem::path& base_dir,
                               bool check_tensors) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) fail(ErrorCode::SchemaError, "manifest root must be an object");

  DatasetManifest m;
  m.base_dir = base_dir;

  // Checks run in phases (schema, bounds, splits, tensors) so the reported
  // error does not depend on the order of entries.
  m.class_count = static_cast<int>(integer(root, "class_count", "manifest"));
  if (m.class_count < 1) fail(ErrorCode::SchemaError, "class_count must be >= 1");
  const json& splits = member(root, "splits", "manifest");
  if (!splits.is_object()) fail(ErrorCode::SchemaError, "splits must be an object");
  m.train_weaksup = id_list(splits, "train_weaksup");
  m.train_fullsup = id_list(splits, "train_fullsup");
  m.test = id_list(splits, "test");
  const json& images = member(root, "images", "manifest");
  if (!images.is_array()) fail(ErrorCode::SchemaError, "images must be an array");
  for (std::size_t i = 0; i < images.size(); ++i) m.entries.push_back(parse_entry(images[i], base_dir, i));
  if (root.contains("weights")) {
    if (!root.at("weights").is_string()) fail(ErrorCode::SchemaError, "weights must be a path string");
    m.weights_path = base_dir / root.at("weights").get<std::string>();
  }

  std::set<std::string> ids;
  for (const auto& e : m.entries) {
    if (!ids.insert(e.image_id).second) fail(ErrorCode::SchemaError, "duplicate image id '" + e.image_id + "'");
    if (e.class_index < 0 || e.class_index >= m.class_count) {
      fail(ErrorCode::SchemaError, "image '" + e.image_id + "': class_index out of [0, class_count)");
    }
  }
  for (Split s : {Split::TrainWeaksup, Split::TrainFullsup, Split::Test}) {
    std::set<std::string> seen;
    for (const auto& id : m.split_ids(s)) {
      if (!ids.count(id)) fail(ErrorCode::SchemaError, "split " + std::string(to_string(s)) + " names unknown id '" + id + "'");
      if (!seen.insert(id).second) fail(ErrorCode::SchemaError, "split " + std::string(to_string(s)) + " lists '" + id + "' twice");
      if (s != Split::TrainWeaksup && m.find(id)->gt_boxes.empty()) {
        fail(ErrorCode::SchemaError, "image '" + id + "' is in a scored split but has no gt_boxes");
      }
    }
  }

  for (const auto& e : m.entries) {
    for (const auto& b : e.gt_boxes) {
      if (!inside(b, e.image_size)) fail(ErrorCode::BoxOutOfBounds, "image '" + e.image_id + "': gt box exceeds image");
    }
  }

  const std::set<std::string> fullsup(m.train_fullsup.begin(), m.train_fullsup.end());
  for (const auto& id : m.test) {
    if (fullsup.count(id)) fail(ErrorCode::OverlappingSplits, "'" + id + "' is in both train_fullsup and test");
  }

  if (check_tensors) {
    std::optional<std::size_t> channels;
    if (m.weights_path) {
      if (!std::filesystem::is_regular_file(*m.weights_path)) {
        fail(ErrorCode::DanglingTensorRef, "weights tensor not found: " + m.weights_path->string());
      }
      const TensorHeader h = read_tensor_header(*m.weights_path);
      if (h.shape.size() != 2 || h.shape[1] != static_cast<std::size_t>(m.class_count)) {
        fail(ErrorCode::SchemaError, "weights must have shape (N, class_count)");
      }
      channels = h.shape[0];
    }
    // Sorted by id so the first failure is independent of entry order.
    std::vector<const ImageEntry*> sorted;
    for (const auto& e : m.entries) sorted.push_back(&e);
    std::ranges::sort(sorted, {}, &ImageEntry::image_id);
    for (const ImageEntry* e : sorted) {
      if (!std::filesystem::is_regular_file(e->featuremap_path)) {
        fail(ErrorCode::DanglingTensorRef, "image '" + e->image_id + "': feature map not found: " + e->featuremap_path.string());
      }
    }
    for (const ImageEntry* e : sorted) {
      const TensorHeader h = read_tensor_header(e->featuremap_path);
      if (h.shape.size() != 3) fail(ErrorCode::SchemaError, "image '" + e->image_id + "': feature map must be (N, I, J)");
      if (channels && h.shape[0] != *channels) {
        fail(ErrorCode::SchemaError, "image '" + e->image_id + "': channel count disagrees with weights");
      }
    }
  }
  return m;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str(), path.parent_path());
}

}  // namespace camwsol
