// Command-line front end: estimate, synth, slices, overlay.

#include <CLI11.hpp>

#include <iostream>

#include "groundpose/app/config.hpp"
#include "groundpose/app/overlay.hpp"
#include "groundpose/app/scenario.hpp"
#include "groundpose/app/sequence.hpp"
#include "groundpose/app/slices.hpp"

using namespace groundpose;
using namespace groundpose::app;

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string input, output, mask;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config_path, "JSON run configuration");
  cmd->add_option("-s,--set", c.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("-i,--input", c.input, "directory of frames (overrides 'input')");
  cmd->add_option("-o,--output", c.output, "output directory (overrides 'output')");
  cmd->add_option("-m,--mask", c.mask, "ground mask image (overrides 'mask')");
}

RunConfig resolve(const Common& c) {
  RunConfig config = c.config_path.empty() ? RunConfig{} : load_config(c.config_path);
  for (const auto& o : c.overrides) apply_override(config, o);
  if (!c.input.empty()) config.input = c.input;
  if (!c.output.empty()) config.output = c.output;
  if (!c.mask.empty()) config.mask = c.mask;
  validate(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground-relative camera pose and planar motion from frame pairs"};
  app.require_subcommand(1);

  Common est_opts;
  auto* estimate = app.add_subcommand("estimate", "estimate every consecutive frame pair");
  add_common(estimate, est_opts);

  std::string scenario_path, preset_name, synth_out = "synth";
  int synth_frames = 0;
  auto* synth = app.add_subcommand("synth", "render a synthetic sequence with ground truth");
  synth->add_option("--scenario", scenario_path, "JSON scenario file");
  synth->add_option("--preset", preset_name, "static | shaking");
  synth->add_option("-o,--output", synth_out, "output directory");
  synth->add_option("--frames", synth_frames, "override the frame count");

  Common slice_opts;
  int slice_pair = 0;
  std::vector<std::string> axes;
  SliceOptions slice_options;
  auto* slices = app.add_subcommand("slices", "sample objective slices around the estimate of one pair");
  add_common(slices, slice_opts);
  slices->add_option("--pair", slice_pair, "pair index within the (strided) sequence");
  slices->add_option("--axis", axes, "axis or a:b pair of axes, repeatable")->required();
  slices->add_option("--angle-span", slice_options.angle_span_deg, "half-width for angles (deg)");
  slices->add_option("--length-span", slice_options.length_span_mm, "half-width for tx/tz (mm)");
  slices->add_option("--steps", slice_options.steps, "samples per axis");

  Common overlay_opts;
  int overlay_pair = 0;
  double factor = 1.0;
  auto* overlay = app.add_subcommand("overlay", "draw displacement fields of one pair");
  add_common(overlay, overlay_opts);
  overlay->add_option("--pair", overlay_pair, "pair index within the (strided) sequence");
  overlay->add_option("--factor", factor, "vector scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (estimate->parsed()) {
      const SequenceOutcome outcome = run_sequence(resolve(est_opts));
      std::cout << format_csv(outcome.rows);
      if (outcome.exit_code == kExitDegraded) std::cerr << "warning: at least one pair is degraded (see diag/)\n";
      return outcome.exit_code;
    }
    if (synth->parsed()) {
      if (scenario_path.empty() == preset_name.empty())
        throw ConfigError("synth needs exactly one of --scenario or --preset");
      SequenceScenario s = scenario_path.empty() ? preset(preset_name) : load_scenario(scenario_path);
      if (synth_frames > 0) s.frames = synth_frames;
      const auto truth = write_sequence(s, synth_out);
      std::cout << "wrote " << s.frames << " frames and truth for " << truth.size() << " pairs to " << synth_out
                << "\n";
      return kExitOk;
    }
    if (slices->parsed()) {
      const RunConfig config = resolve(slice_opts);
      for (const auto& spec : axes) parse_axes(spec);  // reject unknown names before any work
      objective_slices(config, slice_pair, axes, slice_options);
      std::cout << "slices written to " << config.output << "/slices\n";
      return kExitOk;
    }
    if (overlay->parsed()) {
      for (const auto& p : write_overlays(resolve(overlay_opts), overlay_pair, factor)) std::cout << p.string() << "\n";
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
