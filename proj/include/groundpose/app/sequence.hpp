#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "groundpose/app/config.hpp"
#include "groundpose/app/results.hpp"

namespace groundpose::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFatal = 1;
inline constexpr int kExitDegraded = 2;

struct Frames {
  std::vector<std::filesystem::path> paths;  ///< after applying frame_stride
  std::vector<int> indices;                  ///< positions in the unstrided listing
};

Frames select_frames(const RunConfig& config);

/// Estimation of one consecutive pair; `estimate` is empty when the
/// image-plane stage failed.
struct PairRun {
  int frame = 0;  ///< index of the current frame in the input listing
  std::optional<EstimationResult> estimate;
  std::string failure;
};

std::vector<ResultRow> rows_for(const PairRun& run);

struct SequenceOutcome {
  std::vector<ResultRow> rows;
  int exit_code = kExitOk;
};

/// Processes every consecutive pair, writes results.csv, config_used.json and
/// per-stage displacement fields under diag/. Errors that prevent any output
/// (unreadable input, bad config) are thrown.
SequenceOutcome run_sequence(const RunConfig& config);

/// Writes a displacement field as CSV (anchor, displacement, flags).
void write_field_csv(const std::filesystem::path& path, const DisplacementField& field);

}  // namespace groundpose::app
