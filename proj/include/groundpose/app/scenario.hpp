#pragma once

// Synthetic sequences for the `synth` subcommand: a JSON scenario file (or a
// named preset) rendered to numbered frames plus a ground-truth table.

#include <filesystem>
#include <string>
#include <vector>

#include "groundpose/synth.hpp"

namespace groundpose::app {

struct SequenceScenario {
  CameraIntrinsics K;
  int frames = 10;
  double height_mm = 700.0;
  double pitch_deg = 60.0;
  double roll_deg = 0.0;
  // Sinusoidal pose oscillation: pitch_deg + amplitude * sin(2 pi k / period).
  double pitch_amplitude_deg = 0.0;
  double roll_amplitude_deg = 0.0;
  double period_frames = 8.0;
  // Motion between consecutive frames.
  double tx_mm = 0.0;
  double tz_mm = 100.0;
  double psi_deg = 0.0;
  GroundTexture texture;
  double noise_sigma = 0.01;
  std::uint64_t noise_seed = 0;
  int supersample = 2;
  int bit_depth = 16;

  PoseParams pose(int frame) const;
  MotionParams step() const;
  /// Pair (frame - 1, frame) with its true parameters.
  Scenario pair(int frame) const;
};

/// "static" (no motion, no noise: identical frames) or "shaking" (pitch
/// oscillating by 5 deg while driving forward). Throws ConfigError otherwise.
SequenceScenario preset(const std::string& name);

/// Throws ConfigError naming the offending key.
SequenceScenario parse_scenario(const std::string& json_text, const std::string& source = "scenario");
SequenceScenario load_scenario(const std::filesystem::path& path);
std::string to_json_text(const SequenceScenario& scenario);

struct TruthRow {
  int frame = 0;
  ParamVector params;
};

/// Writes frame_NNNN.png, truth.csv and scenario_used.json into `dir`.
std::vector<TruthRow> write_sequence(const SequenceScenario& scenario, const std::filesystem::path& dir);

/// Reads truth.csv as written by write_sequence (angles back in radians).
std::vector<TruthRow> read_truth(const std::filesystem::path& path);

}  // namespace groundpose::app
