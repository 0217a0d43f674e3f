#pragma once

#include <vector>

#include "groundpose/image.hpp"

namespace groundpose {

/// Uniform lattice of interest points, stored row by row.
struct InterestGrid {
  std::vector<ImagePoint> points;
  int rows = 0;
  int cols = 0;
};

/// Lattice spanning [margin, width - margin] x [margin, height - margin].
/// Throws EmptyInterior when the margins exhaust the image and
/// std::invalid_argument for fewer than two rows or columns.
InterestGrid make_grid(const CameraIntrinsics& K, int rows, int cols, double margin);

/// Grid points whose rounded pixel is set in `mask` (nonzero = ground).
std::vector<ImagePoint> select_ground_points(const InterestGrid& grid, const Mask* mask);

/// Square registration window on some plane. The plane (image or virtual IPM)
/// is implied by the caller.
struct PatchSpec {
  ImagePoint center;
  int size = 0;
  bool valid = true;
};

/// Largest power-of-two size in [32, spec.size] whose window fits inside the
/// plane; valid = false when not even 32 fits.
PatchSpec shrink_to_fit(const PatchSpec& spec, int plane_width, int plane_height);

inline constexpr int kMinPatchSize = 32;

}  // namespace groundpose
