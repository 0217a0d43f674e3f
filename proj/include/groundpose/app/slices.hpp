#pragma once

// Objective-function slices: the active cost sampled along one or two
// parameter axes around a center point.

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "groundpose/app/config.hpp"
#include "groundpose/app/image_io.hpp"

namespace groundpose::app {

inline constexpr std::array<std::string_view, 7> kAxisNames = {"theta_p", "phi_p", "theta_c", "phi_c",
                                                               "tx",      "tz",    "psi"};

/// Throws ConfigError listing the valid names.
int axis_index(std::string_view name);
/// "tz" or "theta_p:phi_p".
std::vector<int> parse_axes(const std::string& spec);

struct SliceOptions {
  double angle_span_deg = 10.0;  ///< half-width for angular axes
  double length_span_mm = 50.0;  ///< half-width for tx, tz
  int steps = 41;                ///< samples per axis, odd keeps the center
};

struct Slice {
  std::vector<int> axes;
  std::vector<double> offsets_a;  ///< degrees or mm
  std::vector<double> offsets_b;  ///< empty for a 1-D slice
  std::vector<double> cost;       ///< row-major over (b, a); +inf where the chain leaves the ground
};

Slice sample_slice(const DisplacementField& field, const ParamVector& center, double height,
                   const CameraIntrinsics& K, const std::vector<int>& axes, const SliceOptions& options = {});

void write_slice_csv(const std::filesystem::path& path, const Slice& slice);
/// Log-cost color map, one pixel per sample, row 0 at the smallest b offset.
RgbImage slice_heatmap(const Slice& slice, int cell = 8);

/// Estimates frame pair `pair` of the configured sequence and samples every
/// requested axis spec around the final estimate on the final stage's field.
/// Files go to output/slices/. Returns the sampled slices.
std::vector<Slice> objective_slices(const RunConfig& config, int pair, const std::vector<std::string>& axis_specs,
                                    const SliceOptions& options = {});

}  // namespace groundpose::app
