#include "groundpose/patch_grid.hpp"

#include <cmath>
#include <stdexcept>

namespace groundpose {

InterestGrid make_grid(const CameraIntrinsics& K, int rows, int cols, double margin) {
  if (rows < 2 || cols < 2) throw std::invalid_argument("grid needs at least 2 rows and 2 columns");
  const double span_u = K.width - 2.0 * margin;
  const double span_v = K.height - 2.0 * margin;
  if (!(span_u > 0.0) || !(span_v > 0.0) || margin < 0.0) throw EmptyInterior();

  InterestGrid grid;
  grid.rows = rows;
  grid.cols = cols;
  grid.points.reserve(static_cast<std::size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      grid.points.push_back({margin + span_u * c / (cols - 1), margin + span_v * r / (rows - 1)});
  return grid;
}

std::vector<ImagePoint> select_ground_points(const InterestGrid& grid, const Mask* mask) {
  if (mask == nullptr) return grid.points;
  std::vector<ImagePoint> kept;
  for (const auto& p : grid.points) {
    const int x = static_cast<int>(std::lround(p.u));
    const int y = static_cast<int>(std::lround(p.v));
    if (x >= 0 && y >= 0 && x < mask->width && y < mask->height && mask->at(x, y) != 0) kept.push_back(p);
  }
  return kept;
}

PatchSpec shrink_to_fit(const PatchSpec& spec, int plane_width, int plane_height) {
  PatchSpec out = spec;
  for (int size = spec.size; size >= kMinPatchSize; size /= 2) {
    if (contains(plane_width, plane_height, window_at(spec.center, size))) {
      out.size = size;
      out.valid = true;
      return out;
    }
  }
  out.size = kMinPatchSize;
  out.valid = false;
  return out;
}

}  // namespace groundpose
