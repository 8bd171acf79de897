#ifndef GAZEGRAPH_METRICS_HPP
#define GAZEGRAPH_METRICS_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gazegraph/model.hpp"
#include "gazegraph/world.hpp"

namespace gazegraph {

/// Set-intersection over union of the action tokens, order ignored;
/// two empty sequences count as a perfect match.
double action_iou(std::span<const std::size_t> gold, std::span<const std::size_t> pred);

/// Edit distance (unit-cost insert/delete/substitute) divided by the longer
/// length; 0 when both sequences are empty.
double norm_levenshtein(std::span<const std::size_t> gold, std::span<const std::size_t> pred);

enum class Variant {
  full,
  no_fixation,
  random_fixation,
  random_scanpath,
  visual_only_edges,
  random_object_edges,
  no_activity_head,
  flat_cotrain,
};

Variant parse_variant(const std::string& tag);  // configuration error on unknown
const char* variant_tag(Variant v);

struct EvalReport {
  std::string variant;
  double input_fraction = 0.7;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double iou = 0.0;
  double levenshtein = 0.0;
  double success_rate = 0.0;
  std::size_t sample_count = 0;
};

struct PipelineConfig {
  double crop_half_size = 75.0;   // B
  double merge_threshold = 0.9;   // rho
  EncoderParams encoder;
  ModelConfig model;
  double input_fraction = 0.7;
  std::size_t histogram_bins = 40;
};

/// Fills the dataset-dependent model fields (class counts).
ModelConfig resolve_model_config(const ModelConfig& base, const Dataset& dataset);

/// Per-video fixation tracks for the variant's input transformation,
/// full-length (callers slice the viewed prefix).
std::vector<FrameFixationTrack> variant_tracks(const Dataset& dataset,
                                               const std::vector<std::size_t>& indices,
                                               Variant variant, std::uint64_t seed);

/// Builds the graph/gold pair for one video under the variant.
TrainSample prepare_sample(const Dataset& dataset, std::size_t video_index,
                           const FrameFixationTrack& track, Variant variant,
                           const PipelineConfig& config, const EncoderStack& encoders,
                           std::uint64_t seed);

std::vector<TrainSample> prepare_split(const Dataset& dataset,
                                       const std::vector<std::size_t>& indices, Variant variant,
                                       const PipelineConfig& config, const EncoderStack& encoders,
                                       std::uint64_t seed);

using Predictor = std::function<Prediction(const TrainSample&, std::size_t)>;

/// Metric aggregation over prepared samples with an arbitrary predictor
/// (the model in production, an oracle or chance baseline in tests).
EvalReport evaluate_samples(const Dataset& dataset, const std::vector<std::size_t>& indices,
                            const std::vector<TrainSample>& samples, const Predictor& predictor,
                            double input_fraction, Variant variant, std::uint64_t seed);

ConditionMode inference_condition(Variant variant);

EvalReport evaluate_model(const Model& model, const Dataset& dataset,
                          const std::vector<std::size_t>& indices, Variant variant,
                          const PipelineConfig& config, const EncoderStack& encoders,
                          double input_fraction, std::uint64_t seed);

struct AblationResult {
  EvalReport report;
  std::vector<TrainLogRow> train_log;
  Checkpoint checkpoint;
};

/// Trains under the variant's input/loss modification and evaluates on the
/// test split.
AblationResult ablate(Variant variant, const Dataset& dataset, const PipelineConfig& config,
                      std::uint64_t seed);

/// One train+evaluate per crop size (full variant).
std::vector<std::pair<double, EvalReport>> sweep_crop(const Dataset& dataset,
                                                      const std::vector<double>& sizes,
                                                      const PipelineConfig& config,
                                                      std::uint64_t seed);

struct VideoHistogram {
  std::string video_id;
  std::vector<std::size_t> counts;
};

std::vector<VideoHistogram> dataset_cosine_histograms(const Dataset& dataset,
                                                      const EncoderStack& encoders,
                                                      double crop_half_size, std::size_t bins);

void write_results_csv(const std::string& path, const std::vector<EvalReport>& reports);
void write_train_log_csv(const std::string& path, const std::vector<TrainLogRow>& rows);
void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<double, EvalReport>>& rows);
void write_histogram_csv(const std::string& path, const std::vector<VideoHistogram>& histograms);

}  // namespace gazegraph

#endif  // GAZEGRAPH_METRICS_HPP
