#include "groundpose/app/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "groundpose/app/image_io.hpp"

namespace groundpose::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

template <typename S, typename F>
void visit_fields(S& s, F&& f) {
  f("fx", s.K.fx);
  f("fy", s.K.fy);
  f("cx", s.K.cx);
  f("cy", s.K.cy);
  f("width", s.K.width);
  f("height", s.K.height);
  f("frames", s.frames);
  f("height_mm", s.height_mm);
  f("pitch_deg", s.pitch_deg);
  f("roll_deg", s.roll_deg);
  f("pitch_amplitude_deg", s.pitch_amplitude_deg);
  f("roll_amplitude_deg", s.roll_amplitude_deg);
  f("period_frames", s.period_frames);
  f("tx_mm", s.tx_mm);
  f("tz_mm", s.tz_mm);
  f("psi_deg", s.psi_deg);
  f("texture_seed", s.texture.seed);
  f("feature_scale_mm", s.texture.feature_scale_mm);
  f("amplitude", s.texture.amplitude);
  f("octaves", s.texture.octaves);
  f("stripe_x_mm", s.texture.stripe_x_mm);
  f("stripe_angle_deg", s.texture.stripe_angle);
  f("stripe_width_mm", s.texture.stripe_width_mm);
  f("noise_sigma", s.noise_sigma);
  f("noise_seed", s.noise_seed);
  f("supersample", s.supersample);
  f("bit_depth", s.bit_depth);
}

bool is_angle_key(const std::string& key) { return key == "stripe_angle_deg"; }

}  // namespace

PoseParams SequenceScenario::pose(int frame) const {
  const double phase = 2.0 * std::numbers::pi * frame / period_frames;
  return {(pitch_deg + pitch_amplitude_deg * std::sin(phase)) * kDeg,
          (roll_deg + roll_amplitude_deg * std::cos(phase)) * kDeg, height_mm};
}

MotionParams SequenceScenario::step() const { return {tx_mm, tz_mm, psi_deg * kDeg}; }

Scenario SequenceScenario::pair(int frame) const {
  Scenario sc;
  sc.K = K;
  sc.prev = pose(frame - 1);
  sc.cur = pose(frame);
  sc.motion = step();
  sc.texture = texture;
  sc.noise_sigma = noise_sigma;
  sc.noise_seed = noise_seed;
  sc.supersample = supersample;
  return sc;
}

SequenceScenario preset(const std::string& name) {
  SequenceScenario s;
  if (name == "static") {
    s.tz_mm = 0.0;
    s.noise_sigma = 0.0;
  } else if (name == "shaking") {
    s.pitch_amplitude_deg = 5.0;
    s.roll_amplitude_deg = 2.0;
    s.tz_mm = 120.0;
    s.psi_deg = 0.5;
  } else {
    throw ConfigError("unknown preset '" + name + "'; presets: static, shaking");
  }
  return s;
}

SequenceScenario parse_scenario(const std::string& json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": malformed JSON (" + e.what() + ")");
  }
  if (!doc.is_object()) throw ConfigError(source + ": top level must be an object");
  SequenceScenario s;
  if (doc.contains("preset")) {
    if (!doc["preset"].is_string()) throw ConfigError(source + ": 'preset' must be a string");
    s = preset(doc["preset"].get<std::string>());
  }
  for (const auto& [key, value] : doc.items()) {
    if (key == "preset") continue;
    if (key == "texture_mode") {
      if (value == "value_noise") s.texture.mode = TextureMode::ValueNoise;
      else if (value == "stripe") s.texture.mode = TextureMode::Stripe;
      else throw ConfigError(source + ": 'texture_mode' must be \"value_noise\" or \"stripe\"");
      continue;
    }
    bool found = false;
    visit_fields(s, [&](const char* name, auto& field) {
      if (key != name) return;
      found = true;
      using T = std::decay_t<decltype(field)>;
      if constexpr (std::is_same_v<T, double>) {
        if (!value.is_number()) throw ConfigError(source + ": '" + key + "' must be a number");
        field = value.get<double>() * (is_angle_key(key) ? kDeg : 1.0);
      } else if constexpr (std::is_same_v<T, int>) {
        if (!value.is_number_integer()) throw ConfigError(source + ": '" + key + "' must be an integer");
        field = value.get<int>();
      } else {
        if (!value.is_number_unsigned()) throw ConfigError(source + ": '" + key + "' must be a non-negative integer");
        field = value.get<std::uint64_t>();
      }
    });
    if (!found) throw ConfigError(source + ": unknown key '" + key + "'");
  }
  if (s.frames < 2) throw ConfigError(source + ": 'frames' must be at least 2");
  if (s.bit_depth != 8 && s.bit_depth != 16) throw ConfigError(source + ": 'bit_depth' must be 8 or 16");
  if (!(s.period_frames > 0.0)) throw ConfigError(source + ": 'period_frames' must be positive");
  if (s.supersample < 1) throw ConfigError(source + ": 'supersample' must be at least 1");
  try {
    s.K.validate();
    for (int k = 0; k < s.frames; ++k) validate(s.pose(k));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return s;
}

SequenceScenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

std::string to_json_text(const SequenceScenario& scenario) {
  json doc = json::object();
  doc["texture_mode"] = scenario.texture.mode == TextureMode::Stripe ? "stripe" : "value_noise";
  visit_fields(scenario, [&](const char* name, const auto& field) {
    doc[name] = field;
    if (is_angle_key(name)) doc[name] = field / kDeg;
  });
  return doc.dump(2) + "\n";
}

std::vector<TruthRow> write_sequence(const SequenceScenario& s, const fs::path& dir) {
  fs::create_directories(dir);
  MotionParams world_to_frame;
  std::vector<TruthRow> truth;
  for (int k = 0; k < s.frames; ++k) {
    if (k > 0) world_to_frame = compose(world_to_frame, s.step());
    const ImageBuffer frame = render_frame(s.texture, s.pose(k), world_to_frame, s.K, s.noise_sigma, s.noise_seed,
                                           static_cast<std::uint64_t>(k), s.supersample);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04d.png", k);
    write_png(dir / name, frame, s.bit_depth);
    if (k > 0) truth.push_back({k, s.pair(k).truth()});
  }
  std::ofstream csv(dir / "truth.csv");
  if (!csv) throw IoError("cannot write " + (dir / "truth.csv").string());
  csv << "frame,theta_p_deg,phi_p_deg,theta_c_deg,phi_c_deg,tx_mm,tz_mm,psi_deg,dist_mm\n";
  char buf[256];
  for (const auto& t : truth) {
    const auto& p = t.params;
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", t.frame,
                  p.pitch_prev / kDeg, p.roll_prev / kDeg, p.pitch_cur / kDeg, p.roll_cur / kDeg, p.tx, p.tz,
                  p.yaw / kDeg, travel_distance(p.motion()));
    csv << buf;
  }
  std::ofstream(dir / "scenario_used.json") << to_json_text(s);
  return truth;
}

std::vector<TruthRow> read_truth(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  std::vector<TruthRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
    if (v.size() != 9) throw IoError("malformed truth row in " + path.string());
    rows.push_back({static_cast<int>(v[0]), {v[1] * kDeg, v[2] * kDeg, v[3] * kDeg, v[4] * kDeg, v[5], v[6], v[7] * kDeg}});
  }
  return rows;
}

}  // namespace groundpose::app
