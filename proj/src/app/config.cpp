#include "groundpose/app/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace groundpose::app {

using nlohmann::json;

namespace {

template <typename Config, typename F>
void visit_fields(Config& c, F&& f) {
  f("fx", c.fx);
  f("fy", c.fy);
  f("cx", c.cx);
  f("cy", c.cy);
  f("height_mm", c.height_mm);
  f("grid_rows", c.grid_rows);
  f("grid_cols", c.grid_cols);
  f("grid_margin_px", c.grid_margin_px);
  f("patch_size_image", c.patch_size_image);
  f("patch_size_ipm", c.patch_size_ipm);
  f("ipm_scale_mm", c.ipm_scale_mm);
  f("refinements", c.refinements);
  f("subsets", c.subsets);
  f("ratio", c.ratio);
  f("seed", c.seed);
  f("initial_pitch_deg", c.initial_pitch_deg);
  f("magnitude_outlier_factor", c.magnitude_outlier_factor);
  f("magnitude_outlier_floor_px", c.magnitude_outlier_floor_px);
  f("min_confidence", c.min_confidence);
  f("prediction_outlier_factor", c.prediction_outlier_factor);
  f("prediction_outlier_floor_px", c.prediction_outlier_floor_px);
  f("input", c.input);
  f("mask", c.mask);
  f("output", c.output);
  f("frame_stride", c.frame_stride);
}

void assign(const std::string& key, const json& v, double& field, const std::string& source) {
  if (!v.is_number()) throw ConfigError(source + ": '" + key + "' must be a number");
  field = v.get<double>();
}
void assign(const std::string& key, const json& v, int& field, const std::string& source) {
  if (!v.is_number_integer()) throw ConfigError(source + ": '" + key + "' must be an integer");
  field = v.get<int>();
}
void assign(const std::string& key, const json& v, std::uint64_t& field, const std::string& source) {
  if (!v.is_number_unsigned()) throw ConfigError(source + ": '" + key + "' must be a non-negative integer");
  field = v.get<std::uint64_t>();
}
void assign(const std::string& key, const json& v, std::string& field, const std::string& source) {
  if (!v.is_string()) throw ConfigError(source + ": '" + key + "' must be a string");
  field = v.get<std::string>();
}

void set_key(RunConfig& config, const std::string& key, const json& value, const std::string& source) {
  bool found = false;
  visit_fields(config, [&](const char* name, auto& field) {
    if (key == name) {
      assign(key, value, field, source);
      found = true;
    }
  });
  if (!found) throw ConfigError(source + ": unknown key '" + key + "'");
}

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("config field '" + field + "' " + what);
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
  RunConfig config;
  for (const auto& [key, value] : doc.items()) set_key(config, key, value, source);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

std::string to_json_text(const RunConfig& config) {
  json doc = json::object();
  visit_fields(config, [&](const char* name, const auto& field) { doc[name] = field; });
  return doc.dump(2) + "\n";
}

void apply_override(RunConfig& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;  // bare strings such as paths
  }
  set_key(config, key, value, "override");
}

void validate(const RunConfig& c) {
  require(c.fx > 0.0, "fx", "must be positive");
  require(c.fy > 0.0, "fy", "must be positive");
  require(c.cx >= 0.0, "cx", "must be non-negative");
  require(c.cy >= 0.0, "cy", "must be non-negative");
  require(c.height_mm > 0.0, "height_mm", "must be positive");
  require(c.grid_rows >= 2, "grid_rows", "must be at least 2");
  require(c.grid_cols >= 2, "grid_cols", "must be at least 2");
  require(c.grid_margin_px >= 0.0, "grid_margin_px", "must be non-negative");
  require(is_pow2_patch_size(c.patch_size_image), "patch_size_image", "must be a power of two >= 32");
  require(is_pow2_patch_size(c.patch_size_ipm), "patch_size_ipm", "must be a power of two >= 32");
  require(c.ipm_scale_mm > 0.0, "ipm_scale_mm", "must be positive");
  require(c.refinements >= 0, "refinements", "must be non-negative");
  require(c.subsets >= 1, "subsets", "must be at least 1");
  require(c.ratio > 0.0 && c.ratio <= 1.0, "ratio", "must be in (0, 1]");
  require(c.initial_pitch_deg > 0.0 && c.initial_pitch_deg < 180.0, "initial_pitch_deg", "must be in (0, 180)");
  require(c.magnitude_outlier_factor > 0.0, "magnitude_outlier_factor", "must be positive");
  require(c.magnitude_outlier_floor_px >= 0.0, "magnitude_outlier_floor_px", "must be non-negative");
  require(c.min_confidence >= 0.0 && c.min_confidence <= 1.0, "min_confidence", "must be in [0, 1]");
  require(c.prediction_outlier_factor > 0.0, "prediction_outlier_factor", "must be positive");
  require(c.prediction_outlier_floor_px >= 0.0, "prediction_outlier_floor_px", "must be non-negative");
  require(c.frame_stride >= 1, "frame_stride", "must be at least 1");
}

CameraIntrinsics intrinsics(const RunConfig& c, int width, int height) {
  CameraIntrinsics K{c.fx, c.fy, c.cx, c.cy, width, height};
  try {
    K.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("intrinsics (fx, fy, cx, cy) invalid for the frame size: ") + e.what());
  }
  return K;
}

EstimatorConfig estimator_config(const RunConfig& c, std::optional<Mask> mask) {
  constexpr double deg = std::numbers::pi / 180.0;
  EstimatorConfig e;
  e.height_mm = c.height_mm;
  e.grid_rows = c.grid_rows;
  e.grid_cols = c.grid_cols;
  e.grid_margin = c.grid_margin_px;
  e.patch_size_image = c.patch_size_image;
  e.patch_size_ipm = c.patch_size_ipm;
  e.ipm_scale_mm = c.ipm_scale_mm;
  e.refinements = c.refinements;
  e.initial_pitch = c.initial_pitch_deg * deg;
  e.prediction_outlier_factor = c.prediction_outlier_factor;
  e.prediction_outlier_floor_px = c.prediction_outlier_floor_px;
  e.robust.subsets = c.subsets;
  e.robust.ratio = c.ratio;
  e.robust.seed = c.seed;
  e.robust.magnitude_factor = c.magnitude_outlier_factor;
  e.robust.magnitude_floor_px = c.magnitude_outlier_floor_px;
  e.robust.min_confidence = c.min_confidence;
  e.mask = std::move(mask);
  return e;
}

}  // namespace groundpose::app
