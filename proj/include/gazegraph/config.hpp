#ifndef GAZEGRAPH_CONFIG_HPP
#define GAZEGRAPH_CONFIG_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gazegraph/metrics.hpp"

namespace gazegraph {

/// Flat run configuration. Defaults are the paper-scale constants; the desk
/// configs shipped under configs/ shrink the model so full runs finish in
/// seconds. One global seed fans out to every component stream.
struct RunConfig {
  std::uint64_t seed = 0;

  // dataset
  std::size_t activities = 18;
  std::size_t cameras = 4;
  std::size_t videos_per_pair = 2;
  double test_fraction = 0.25;
  double fps = 10.0;
  std::size_t min_actions = 9;
  std::size_t max_actions = 21;
  double target_actions = 15.0;
  double jitter_px = 20.0;
  double distractor_prob = 0.1;
  double anticipation_fraction = 0.2;
  std::size_t min_action_frames = 3;
  std::size_t max_action_frames = 7;
  double screen_width_px = 1920.0;
  double screen_height_px = 1080.0;
  double physical_width_mm = 530.0;
  double viewing_distance_mm = 600.0;

  // gaze filtering
  double velocity_threshold = 30.0;  // deg/s
  double min_fixation_ms = 60.0;

  // graph + encoders
  double crop_size = 75.0;        // B
  double merge_threshold = 0.9;   // rho
  std::size_t node_dim = 512;
  std::size_t label_dim = 300;    // edge attr dim = 2 * label_dim
  double alpha = 1.0;
  double beta = 0.5;
  double gamma = 0.1;
  std::size_t grid_cols = 6;
  std::size_t grid_rows = 4;
  double detector_accuracy = 0.72;

  // model + training
  std::size_t ecc_layers = 3;
  std::size_t ecc_hidden = 128;
  std::size_t mlp_hidden = 128;
  std::size_t lstm_hidden = 384;
  std::size_t lstm_layers = 2;
  std::size_t max_decode_len = 24;
  bool autoregressive = false;
  double learning_rate = 1e-3;
  std::size_t epochs = 300;

  // evaluation
  double input_fraction = 0.7;
  std::string variant = "full";
  std::size_t histogram_bins = 40;
  std::string sweep_sizes = "25,50,75,100";

  DatasetConfig dataset_config() const;
  PipelineConfig pipeline_config() const;
  ScreenGeometry geometry() const;
};

/// key = value file; '#' starts a comment; unknown keys are rejected.
RunConfig load_config_file(const std::string& path, RunConfig base = {});

/// Applies one "key=value" assignment.
void apply_override(RunConfig& config, const std::string& assignment);

/// Applies GAZEGRAPH_<UPPER_KEY> environment variables (CI hook).
void apply_env_overrides(RunConfig& config);

/// All keys with their current values, in declaration order.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);

std::vector<double> parse_size_list(const std::string& text);

/// Run-manifest: resolved config echo plus artifact hashes, enough to
/// reproduce the run.
void write_run_manifest(const std::string& path, const std::string& command,
                        const RunConfig& config,
                        const std::vector<std::string>& artifact_paths);

std::uint64_t file_hash(const std::string& path);  // FNV-1a over the bytes

}  // namespace gazegraph

#endif  // GAZEGRAPH_CONFIG_HPP
