#pragma once

#include <stdexcept>
#include <string>

namespace groundpose {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// geometry
class NonPositiveDepth : public Error {
public:
  NonPositiveDepth() : Error("point maps behind or onto the camera plane") {}
};

class AboveHorizon : public Error {
public:
  AboveHorizon() : Error("viewing ray does not intersect the ground in front of the camera") {}
};

// registration
class SizeMismatch : public Error {
public:
  using Error::Error;
};

class DegeneratePatch : public Error {
public:
  DegeneratePatch() : Error("patch intensity variance below 1e-8") {}
};

class OutOfBounds : public Error {
public:
  using Error::Error;
};

// patch_grid
class EmptyInterior : public Error {
public:
  EmptyInterior() : Error("grid margin leaves no image interior") {}
};

// estimator
class InsufficientInliers : public Error {
public:
  InsufficientInliers(std::size_t have, std::size_t need)
      : Error("insufficient inliers: have " + std::to_string(have) + ", need " + std::to_string(need)) {}
};

// cli / io
class IoError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace groundpose
