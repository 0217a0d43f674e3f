#pragma once

// Phase-only correlation (POC) between two equally sized square patches.
//
// Sign convention: a positive (dx, dy) means the content of `cur` appears
// shifted by (+dx, +dy) pixels relative to `ref`.

#include "groundpose/image.hpp"

namespace groundpose {

struct Displacement {
  double dx = 0.0;
  double dy = 0.0;
  double confidence = 0.0;  ///< correlation peak height in [0, 1]
};

struct PocOptions {
  /// Radial pass band as fractions of the Nyquist radius.
  double lowpass = 0.5;
  double highpass = 0.0;
};

/// Throws SizeMismatch unless both patches are square, identical in size and
/// a power of two >= 32; DegeneratePatch when either patch is (nearly) uniform.
Displacement poc_register(const ImageBuffer& ref, const ImageBuffer& cur, const PocOptions& options = {});

bool is_pow2_patch_size(int size);

}  // namespace groundpose
