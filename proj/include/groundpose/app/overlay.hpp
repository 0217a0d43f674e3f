#pragma once

#include <filesystem>
#include <vector>

#include "groundpose/app/config.hpp"
#include "groundpose/app/image_io.hpp"

namespace groundpose::app {

inline constexpr std::uint8_t kInlierColor[3] = {0, 220, 0};
inline constexpr std::uint8_t kOutlierColor[3] = {230, 0, 0};

/// The plane image in gray with one vector per valid entry, from the anchor
/// to anchor + factor * d. Same dimensions as `base`.
RgbImage flow_overlay(const ImageBuffer& base, const DisplacementField& field, double factor = 1.0);

/// Estimates pair `pair` of the configured sequence and writes one overlay
/// per stage to output/overlay/. Returns the written paths.
std::vector<std::filesystem::path> write_overlays(const RunConfig& config, int pair, double factor = 1.0);

}  // namespace groundpose::app
