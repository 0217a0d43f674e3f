#include "groundpose/app/slices.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>

#include "groundpose/app/sequence.hpp"

namespace groundpose::app {

namespace fs = std::filesystem;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

bool is_length(int axis) { return axis == 4 || axis == 5; }

std::string axis_list() {
  std::string s;
  for (const auto& n : kAxisNames) s += (s.empty() ? "" : ", ") + std::string(n);
  return s;
}

std::vector<double> offsets(int axis, const SliceOptions& o) {
  const double span = is_length(axis) ? o.length_span_mm : o.angle_span_deg;
  std::vector<double> v(static_cast<std::size_t>(o.steps));
  for (int i = 0; i < o.steps; ++i) v[static_cast<std::size_t>(i)] = o.steps == 1 ? 0.0 : -span + 2.0 * span * i / (o.steps - 1);
  return v;
}

double to_internal(int axis, double offset) { return is_length(axis) ? offset : offset * kDeg; }

}  // namespace

int axis_index(std::string_view name) {
  for (std::size_t i = 0; i < kAxisNames.size(); ++i)
    if (kAxisNames[i] == name) return static_cast<int>(i);
  throw ConfigError("unknown axis '" + std::string(name) + "'; valid axes: " + axis_list());
}

std::vector<int> parse_axes(const std::string& spec) {
  std::vector<int> axes;
  std::size_t start = 0;
  while (true) {
    const auto colon = spec.find(':', start);
    axes.push_back(axis_index(spec.substr(start, colon == std::string::npos ? std::string::npos : colon - start)));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (axes.size() > 2) throw ConfigError("slice '" + spec + "' has more than two axes");
  if (axes.size() == 2 && axes[0] == axes[1]) throw ConfigError("slice '" + spec + "' repeats an axis");
  return axes;
}

Slice sample_slice(const DisplacementField& field, const ParamVector& center, double height,
                   const CameraIntrinsics& K, const std::vector<int>& axes, const SliceOptions& options) {
  if (axes.empty() || axes.size() > 2) throw std::invalid_argument("slices have one or two axes");
  if (options.steps < 1) throw std::invalid_argument("slice needs at least one step");
  Slice s;
  s.axes = axes;
  s.offsets_a = offsets(axes[0], options);
  if (axes.size() == 2) s.offsets_b = offsets(axes[1], options);
  const auto nb = std::max<std::size_t>(1, s.offsets_b.size());
  s.cost.assign(nb * s.offsets_a.size(), std::numeric_limits<double>::infinity());
  const auto base = center.to_array();
  for (std::size_t b = 0; b < nb; ++b)
    for (std::size_t a = 0; a < s.offsets_a.size(); ++a) {
      auto p = base;
      p[static_cast<std::size_t>(axes[0])] += to_internal(axes[0], s.offsets_a[a]);
      if (axes.size() == 2) p[static_cast<std::size_t>(axes[1])] += to_internal(axes[1], s.offsets_b[b]);
      if (const auto c = field_cost(field, ParamVector::from_array(p), height, K))
        s.cost[b * s.offsets_a.size() + a] = *c;
    }
  return s;
}

void write_slice_csv(const fs::path& path, const Slice& s) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  char buf[128];
  if (s.offsets_b.empty()) {
    out << "offset_" << kAxisNames[static_cast<std::size_t>(s.axes[0])] << ",cost\n";
    for (std::size_t a = 0; a < s.offsets_a.size(); ++a) {
      std::snprintf(buf, sizeof buf, "%.9g,%.9g\n", s.offsets_a[a], s.cost[a]);
      out << buf;
    }
  } else {
    out << "offset_" << kAxisNames[static_cast<std::size_t>(s.axes[0])] << ",offset_"
        << kAxisNames[static_cast<std::size_t>(s.axes[1])] << ",cost\n";
    for (std::size_t b = 0; b < s.offsets_b.size(); ++b)
      for (std::size_t a = 0; a < s.offsets_a.size(); ++a) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g\n", s.offsets_a[a], s.offsets_b[b],
                      s.cost[b * s.offsets_a.size() + a]);
        out << buf;
      }
  }
}

RgbImage slice_heatmap(const Slice& s, int cell) {
  const int na = static_cast<int>(s.offsets_a.size());
  const int nb = static_cast<int>(std::max<std::size_t>(1, s.offsets_b.size()));
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const double c : s.cost)
    if (std::isfinite(c)) {
      lo = std::min(lo, std::log10(c + 1e-12));
      hi = std::max(hi, std::log10(c + 1e-12));
    }
  RgbImage img(na * cell, nb * cell);
  for (int b = 0; b < nb; ++b)
    for (int a = 0; a < na; ++a) {
      const double c = s.cost[static_cast<std::size_t>(b) * na + a];
      std::uint8_t r = 255, g = 255, bl = 255;  // white where undefined
      if (std::isfinite(c)) {
        const double t = hi > lo ? (std::log10(c + 1e-12) - lo) / (hi - lo) : 0.0;
        // dark blue (low) through yellow (high)
        r = static_cast<std::uint8_t>(std::lround(255.0 * t));
        g = static_cast<std::uint8_t>(std::lround(40.0 + 200.0 * t));
        bl = static_cast<std::uint8_t>(std::lround(120.0 * (1.0 - t)));
      }
      for (int y = 0; y < cell; ++y)
        for (int x = 0; x < cell; ++x) img.set(a * cell + x, b * cell + y, r, g, bl);
    }
  return img;
}

std::vector<Slice> objective_slices(const RunConfig& config, int pair, const std::vector<std::string>& axis_specs,
                                    const SliceOptions& options) {
  validate(config);
  std::vector<std::vector<int>> parsed;
  for (const auto& spec : axis_specs) parsed.push_back(parse_axes(spec));
  if (parsed.empty()) throw ConfigError("no slice axes requested; valid axes: " + axis_list());

  const Frames frames = select_frames(config);
  if (pair < 0 || static_cast<std::size_t>(pair) + 1 >= frames.paths.size())
    throw ConfigError("pair index " + std::to_string(pair) + " out of range");
  const ImageBuffer prev = read_image(frames.paths[static_cast<std::size_t>(pair)]);
  const ImageBuffer cur = read_image(frames.paths[static_cast<std::size_t>(pair) + 1]);
  const CameraIntrinsics K = intrinsics(config, prev.width(), prev.height());
  std::optional<Mask> mask;
  if (!config.mask.empty()) mask = read_mask(config.mask);
  const EstimationResult est = estimate_pair(prev, cur, K, estimator_config(config, mask));
  const StageResult& stage = est.history.back();

  const fs::path dir = fs::path(config.output) / "slices";
  fs::create_directories(dir);
  std::vector<Slice> slices;
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    Slice s = sample_slice(stage.field, stage.params, config.height_mm, K, parsed[i], options);
    std::string name = std::string(kAxisNames[static_cast<std::size_t>(s.axes[0])]);
    if (s.axes.size() == 2) name += "_" + std::string(kAxisNames[static_cast<std::size_t>(s.axes[1])]);
    write_slice_csv(dir / (name + ".csv"), s);
    if (s.axes.size() == 2) write_png(dir / (name + ".png"), slice_heatmap(s));
    slices.push_back(std::move(s));
  }
  return slices;
}

}  // namespace groundpose::app
