#include "groundpose/image.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace groundpose {

ImageBuffer::ImageBuffer(int width, int height, float fill)
    : width_(width), height_(height),
      pixels_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image dimensions");
}

ImageBuffer::ImageBuffer(int width, int height, std::vector<float> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width < 0 || height < 0 ||
      pixels_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("pixel count does not match image dimensions");
}

float sample_bilinear(const ImageBuffer& img, double u, double v) {
  const int x0 = std::clamp(static_cast<int>(u), 0, std::max(img.width() - 2, 0));
  const int y0 = std::clamp(static_cast<int>(v), 0, std::max(img.height() - 2, 0));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  const double top = img.at(x0, y0) + fx * (img.at(x1, y0) - img.at(x0, y0));
  const double bottom = img.at(x0, y1) + fx * (img.at(x1, y1) - img.at(x0, y1));
  return static_cast<float>(top + fy * (bottom - top));
}

Window window_at(const ImagePoint& center, int size) {
  const int cx = static_cast<int>(std::lround(center.u));
  const int cy = static_cast<int>(std::lround(center.v));
  return {cx - size / 2, cy - size / 2, size};
}

bool contains(int width, int height, const Window& w) {
  return w.left >= 0 && w.top >= 0 && w.left + w.size <= width && w.top + w.size <= height;
}

ImageBuffer crop_patch(const ImageBuffer& img, const ImagePoint& center, int size) {
  if (size <= 0) throw std::invalid_argument("patch size must be positive");
  const Window w = window_at(center, size);
  if (!contains(img.width(), img.height(), w))
    throw OutOfBounds("patch of size " + std::to_string(size) + " at (" + std::to_string(center.u) + ", " +
                      std::to_string(center.v) + ") protrudes from the image");
  ImageBuffer out(size, size);
  for (int y = 0; y < size; ++y) {
    auto src = img.row(w.top + y).subspan(static_cast<std::size_t>(w.left), static_cast<std::size_t>(size));
    std::copy(src.begin(), src.end(), out.row(y).begin());
  }
  return out;
}

double coverage(const Mask& mask, const Window& w) {
  std::size_t set = 0;
  for (int y = w.top; y < w.top + w.size; ++y)
    for (int x = w.left; x < w.left + w.size; ++x) set += mask.at(x, y) != 0;
  return static_cast<double>(set) / (static_cast<double>(w.size) * w.size);
}

ImageBuffer downsample2(const ImageBuffer& img) {
  ImageBuffer out(img.width() / 2, img.height() / 2);
  for (int y = 0; y < out.height(); ++y)
    for (int x = 0; x < out.width(); ++x)
      out.at(x, y) = 0.25f * (img.at(2 * x, 2 * y) + img.at(2 * x + 1, 2 * y) + img.at(2 * x, 2 * y + 1) +
                              img.at(2 * x + 1, 2 * y + 1));
  return out;
}

double mean(std::span<const float> values) {
  if (values.empty()) return 0.0;
  double s = 0.0;
  for (float x : values) s += x;
  return s / static_cast<double>(values.size());
}

double variance(std::span<const float> values) {
  if (values.empty()) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (float x : values) s += (x - m) * (x - m);
  return s / static_cast<double>(values.size());
}

}  // namespace groundpose
