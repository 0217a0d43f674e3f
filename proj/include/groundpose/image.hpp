#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "groundpose/geometry.hpp"

namespace groundpose {

/// Single-channel grayscale raster, row-major, intensities nominally in [0, 1].
class ImageBuffer {
public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, float fill = 0.0f);
  ImageBuffer(int width, int height, std::vector<float> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return pixels_.empty(); }

  float& at(int x, int y) { return pixels_[index(x, y)]; }
  float at(int x, int y) const { return pixels_[index(x, y)]; }

  std::span<float> row(int y) { return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)}; }
  std::span<const float> row(int y) const {
    return {pixels_.data() + index(0, y), static_cast<std::size_t>(width_)};
  }

  std::span<const float> pixels() const { return pixels_; }
  std::span<float> pixels() { return pixels_; }

  bool operator==(const ImageBuffer&) const = default;

private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> pixels_;
};

/// Binary raster; nonzero marks a valid (or ground) pixel.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  Mask() = default;
  Mask(int w, int h, std::uint8_t fill = 1)
      : width(w), height(h), bits(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}
  std::uint8_t at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  std::uint8_t& at(int x, int y) {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
  }
  bool operator==(const Mask&) const = default;
};

/// Bilinear sample with pixel centers at integer coordinates; nullopt-free:
/// callers must check `inside_for_bilinear` first.
float sample_bilinear(const ImageBuffer& img, double u, double v);
inline bool inside_for_bilinear(const ImageBuffer& img, double u, double v) {
  return u >= 0.0 && v >= 0.0 && u <= img.width() - 1 && v <= img.height() - 1;
}

/// Top-left corner of the size x size window centered at the rounded point.
struct Window {
  int left = 0;
  int top = 0;
  int size = 0;
};
Window window_at(const ImagePoint& center, int size);
bool contains(int width, int height, const Window& w);

/// Window of `img` centered at the rounded `center`; throws OutOfBounds when it protrudes.
ImageBuffer crop_patch(const ImageBuffer& img, const ImagePoint& center, int size);

/// Fraction of set pixels of `mask` inside the window (window must be contained).
double coverage(const Mask& mask, const Window& w);

/// 2x box downsampling (odd trailing row/column dropped).
ImageBuffer downsample2(const ImageBuffer& img);

double mean(std::span<const float> values);
double variance(std::span<const float> values);

}  // namespace groundpose
