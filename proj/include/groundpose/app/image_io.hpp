#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "groundpose/image.hpp"

namespace groundpose::app {

/// 8/16-bit PNG or PGM (P2/P5); color converted by Rec. 601 luminance.
/// Intensities are normalized to [0, 1]. Throws IoError naming the path.
ImageBuffer read_image(const std::filesystem::path& path);

/// Nonzero pixels become 1.
Mask read_mask(const std::filesystem::path& path);

/// Grayscale PNG, values clamped to [0, 1] and quantized to bit_depth (8 or 16).
void write_png(const std::filesystem::path& path, const ImageBuffer& img, int bit_depth = 16);

struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  ///< interleaved RGB, row-major

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(static_cast<std::size_t>(w) * h * 3, 0) {}
  void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const auto i = (static_cast<std::size_t>(y) * width + x) * 3;
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
  }
};

void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Image files (.png, .pgm) of a directory in lexicographic order.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

}  // namespace groundpose::app
