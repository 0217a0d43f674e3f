#include "groundpose/app/sequence.hpp"

#include <cstdio>
#include <fstream>
#include <limits>

#include "groundpose/app/image_io.hpp"

namespace groundpose::app {

namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
}

std::string pair_tag(int frame) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "pair_%05d", frame);
  return buf;
}

}  // namespace

Frames select_frames(const RunConfig& config) {
  if (config.input.empty()) throw ConfigError("config field 'input' is required");
  const auto all = list_frames(config.input);
  Frames frames;
  for (std::size_t i = 0; i < all.size(); i += static_cast<std::size_t>(config.frame_stride)) {
    frames.paths.push_back(all[i]);
    frames.indices.push_back(static_cast<int>(i));
  }
  if (frames.paths.size() < 2)
    throw IoError("need at least two frames in " + config.input + " (found " + std::to_string(frames.paths.size()) +
                  " after stride)");
  return frames;
}

std::vector<ResultRow> rows_for(const PairRun& run) {
  std::vector<ResultRow> rows;
  if (!run.estimate) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ParamVector p{nan, nan, nan, nan, nan, nan, nan};
    rows.push_back(make_row(run.frame, "initial", p, nan, 0, "failed"));
    return rows;
  }
  const auto& est = *run.estimate;
  for (std::size_t k = 0; k < est.history.size(); ++k) {
    const auto& s = est.history[k];
    const bool last = k + 1 == est.history.size();
    rows.push_back(make_row(run.frame, s.name, s.params, s.rms, s.inliers, last && est.degraded ? "degraded" : "ok"));
  }
  return rows;
}

void write_field_csv(const fs::path& path, const DisplacementField& field) {
  std::string text = "anchor_u,anchor_v,dx,dy,confidence,patch_size,valid,inlier\n";
  char buf[256];
  for (const auto& e : field.entries) {
    std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d,%d\n", e.anchor.u, e.anchor.v, e.d.dx, e.d.dy,
                  e.d.confidence, e.patch_size, e.valid ? 1 : 0, e.inlier ? 1 : 0);
    text += buf;
  }
  write_text(path, text);
}

SequenceOutcome run_sequence(const RunConfig& config) {
  validate(config);
  const Frames frames = select_frames(config);
  std::optional<Mask> mask;
  if (!config.mask.empty()) mask = read_mask(config.mask);

  const fs::path out_dir = config.output;
  fs::create_directories(out_dir / "diag");
  write_text(out_dir / "config_used.json", to_json_text(config));

  SequenceOutcome outcome;
  ImageBuffer prev = read_image(frames.paths[0]);
  const CameraIntrinsics K = intrinsics(config, prev.width(), prev.height());
  const EstimatorConfig est_config = estimator_config(config, mask);
  for (std::size_t i = 1; i < frames.paths.size(); ++i) {
    ImageBuffer cur = read_image(frames.paths[i]);
    if (cur.width() != prev.width() || cur.height() != prev.height())
      throw SizeMismatch("frame " + frames.paths[i].string() + " differs in size from the first frame");
    PairRun run;
    run.frame = frames.indices[i];
    try {
      run.estimate = estimate_pair(prev, cur, K, est_config);
    } catch (const Error& e) {
      run.failure = e.what();
    }
    const std::string tag = pair_tag(run.frame);
    if (run.estimate) {
      for (const auto& s : run.estimate->history) write_field_csv(out_dir / "diag" / (tag + "_" + s.name + ".csv"), s.field);
      if (run.estimate->degraded) write_text(out_dir / "diag" / (tag + "_degraded.txt"), run.estimate->failure + "\n");
    } else {
      write_text(out_dir / "diag" / (tag + "_failed.txt"), run.failure + "\n");
    }
    if (!run.estimate || run.estimate->degraded) outcome.exit_code = kExitDegraded;
    for (auto& row : rows_for(run)) outcome.rows.push_back(std::move(row));
    prev = std::move(cur);
  }
  write_text(out_dir / "results.csv", format_csv(outcome.rows));
  return outcome;
}

}  // namespace groundpose::app
