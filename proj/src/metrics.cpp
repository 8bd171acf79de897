#include "gazegraph/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include "gazegraph/rng.hpp"

namespace gazegraph {

double action_iou(std::span<const std::size_t> gold, std::span<const std::size_t> pred) {
  const std::set<std::size_t> g(gold.begin(), gold.end());
  const std::set<std::size_t> p(pred.begin(), pred.end());
  if (g.empty() && p.empty()) return 1.0;
  std::size_t inter = 0;
  for (std::size_t x : g) inter += p.count(x);
  const std::size_t uni = g.size() + p.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double norm_levenshtein(std::span<const std::size_t> gold, std::span<const std::size_t> pred) {
  const std::size_t n = gold.size();
  const std::size_t m = pred.size();
  if (n == 0 && m == 0) return 0.0;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (gold[i - 1] == pred[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return static_cast<double>(prev[m]) / static_cast<double>(std::max(n, m));
}

namespace {

constexpr std::array<const char*, 8> kVariantTags = {
    "full",          "no_fixation",        "random_fixation",  "random_scanpath",
    "visual_only_edges", "random_object_edges", "no_activity_head", "flat_cotrain"};

}  // namespace

Variant parse_variant(const std::string& tag) {
  for (std::size_t i = 0; i < kVariantTags.size(); ++i)
    if (tag == kVariantTags[i]) return static_cast<Variant>(i);
  throw std::invalid_argument("unknown ablation variant: '" + tag + "'");
}

const char* variant_tag(Variant v) { return kVariantTags[static_cast<std::size_t>(v)]; }

ModelConfig resolve_model_config(const ModelConfig& base, const Dataset& dataset) {
  ModelConfig c = base;
  c.activity_classes = dataset.activity_names.size();
  c.action_classes = dataset.action_vocab.size() + 1;  // + EOS
  return c;
}

std::vector<FrameFixationTrack> variant_tracks(const Dataset& dataset,
                                               const std::vector<std::size_t>& indices,
                                               Variant variant, std::uint64_t seed) {
  std::vector<FrameFixationTrack> tracks;
  tracks.reserve(indices.size());
  switch (variant) {
    case Variant::random_fixation: {
      for (std::size_t idx : indices) {
        const SyntheticVideo& v = *dataset.videos[idx];
        tracks.push_back(random_fixation_track(v.frame_count(), v.geometry(),
                                               seed_for(seed, "random-fixation", idx)));
      }
      return tracks;
    }
    case Variant::random_scanpath: {
      const auto perm = scanpath_derangement(indices.size(), seed_for(seed, "scanpath"));
      for (std::size_t i = 0; i < indices.size(); ++i) {
        const SyntheticVideo& target = *dataset.videos[indices[i]];
        const SyntheticVideo& source = *dataset.videos[indices[perm[i]]];
        tracks.push_back(resample_track(source.scanpath, target.frame_count()));
      }
      return tracks;
    }
    default: {
      for (std::size_t idx : indices) tracks.push_back(dataset.videos[idx]->scanpath);
      return tracks;
    }
  }
}

TrainSample prepare_sample(const Dataset& dataset, std::size_t video_index,
                           const FrameFixationTrack& track, Variant variant,
                           const PipelineConfig& config, const EncoderStack& encoders,
                           std::uint64_t seed) {
  const SyntheticVideo& video = *dataset.videos[video_index];
  const std::size_t total = video.frame_count();
  std::size_t viewed_frames =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                   config.input_fraction * static_cast<double>(total))));
  viewed_frames = std::min(viewed_frames, total);

  FrameFixationTrack prefix;
  prefix.x.assign(track.x.begin(), track.x.begin() + static_cast<std::ptrdiff_t>(viewed_frames));
  prefix.y.assign(track.y.begin(), track.y.begin() + static_cast<std::ptrdiff_t>(viewed_frames));

  GraphBuildOptions opts;
  opts.crop_half_size = config.crop_half_size;
  opts.merge_threshold = config.merge_threshold;
  opts.node_source =
      variant == Variant::no_fixation ? NodeSource::whole_frame : NodeSource::fixation_patch;
  opts.randomize_objects = variant == Variant::random_object_edges;
  opts.randomize_seed = seed_for(seed, "random-objects", video_index);

  ActivityGraph graph = build_graph(video, prefix, encoders, opts);
  add_self_loops(graph, encoders);
  if (variant == Variant::visual_only_edges) zero_edge_attrs(graph);

  TrainSample sample;
  sample.graph = to_graph_input(graph);
  sample.activity = video.activity_index;
  const std::size_t viewed_actions = video.viewed_action_count(viewed_frames);
  for (std::size_t i = viewed_actions; i < video.program.size(); ++i)
    sample.gold_actions.push_back(dataset.token_of(video.program[i]));
  return sample;
}

std::vector<TrainSample> prepare_split(const Dataset& dataset,
                                       const std::vector<std::size_t>& indices, Variant variant,
                                       const PipelineConfig& config, const EncoderStack& encoders,
                                       std::uint64_t seed) {
  const auto tracks = variant_tracks(dataset, indices, variant, seed);
  std::vector<TrainSample> samples;
  samples.reserve(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i)
    samples.push_back(
        prepare_sample(dataset, indices[i], tracks[i], variant, config, encoders, seed));
  return samples;
}

EvalReport evaluate_samples(const Dataset& dataset, const std::vector<std::size_t>& indices,
                            const std::vector<TrainSample>& samples, const Predictor& predictor,
                            double input_fraction, Variant variant, std::uint64_t seed) {
  if (indices.empty()) throw std::invalid_argument("evaluate: empty split");
  if (indices.size() != samples.size())
    throw std::invalid_argument("evaluate: index/sample count mismatch");

  EvalReport report;
  report.variant = variant_tag(variant);
  report.input_fraction = input_fraction;
  report.seed = seed;
  report.sample_count = indices.size();

  double iou_sum = 0.0, lev_sum = 0.0;
  std::size_t correct = 0;
  std::vector<SuccessCase> cases;
  cases.reserve(indices.size());

  for (std::size_t i = 0; i < indices.size(); ++i) {
    const SyntheticVideo& video = *dataset.videos[indices[i]];
    const Prediction pred = predictor(samples[i], i);
    if (pred.activity == samples[i].activity) ++correct;
    iou_sum += action_iou(samples[i].gold_actions, pred.actions);
    lev_sum += norm_levenshtein(samples[i].gold_actions, pred.actions);

    SuccessCase sc;
    sc.video = &video;
    const std::size_t viewed = video.program.size() - samples[i].gold_actions.size();
    sc.viewed.assign(video.program.begin(),
                     video.program.begin() + static_cast<std::ptrdiff_t>(viewed));
    for (std::size_t tok : pred.actions) {
      if (tok < dataset.action_vocab.size()) sc.predicted.push_back(dataset.action_vocab[tok]);
    }
    cases.push_back(std::move(sc));
  }

  const double n = static_cast<double>(indices.size());
  report.accuracy = static_cast<double>(correct) / n;
  report.iou = iou_sum / n;
  report.levenshtein = lev_sum / n;
  report.success_rate = success_rate(cases);
  return report;
}

ConditionMode inference_condition(Variant variant) {
  if (variant == Variant::no_activity_head || variant == Variant::flat_cotrain)
    return ConditionMode::none;
  return ConditionMode::predicted_activity;
}

EvalReport evaluate_model(const Model& model, const Dataset& dataset,
                          const std::vector<std::size_t>& indices, Variant variant,
                          const PipelineConfig& config, const EncoderStack& encoders,
                          double input_fraction, std::uint64_t seed) {
  PipelineConfig cfg = config;
  cfg.input_fraction = input_fraction;
  const auto samples = prepare_split(dataset, indices, variant, cfg, encoders, seed);
  const ConditionMode mode = inference_condition(variant);
  const Predictor predictor = [&](const TrainSample& s, std::size_t) {
    return model.predict(s.graph, mode);
  };
  return evaluate_samples(dataset, indices, samples, predictor, input_fraction, variant, seed);
}

AblationResult ablate(Variant variant, const Dataset& dataset, const PipelineConfig& config,
                      std::uint64_t seed) {
  if (dataset.train_indices.empty() || dataset.test_indices.empty())
    throw std::invalid_argument("ablate: dataset needs both train and test splits");

  SyntheticEncoders encoders(default_vocabulary(), config.encoder);
  const ModelConfig model_cfg = resolve_model_config(config.model, dataset);

  const auto train_samples =
      prepare_split(dataset, dataset.train_indices, variant, config, encoders, seed);

  Model model(model_cfg, seed_for(seed, "init"));
  TrainOptions opts;
  opts.epochs = model_cfg.epochs;
  opts.learning_rate = model_cfg.learning_rate;
  switch (variant) {
    case Variant::no_activity_head:
      opts.loss_mode = LossMode::action_only;
      opts.condition_mode = ConditionMode::none;
      break;
    case Variant::flat_cotrain:
      opts.loss_mode = LossMode::joint;
      opts.condition_mode = ConditionMode::none;
      break;
    default:
      opts.loss_mode = LossMode::joint;
      opts.condition_mode = ConditionMode::gold_activity;
      break;
  }

  AblationResult result;
  result.train_log = train_model(model, train_samples, opts);
  result.report = evaluate_model(model, dataset, dataset.test_indices, variant, config, encoders,
                                 config.input_fraction, seed);
  result.checkpoint = model_checkpoint(
      model, {{"variant", variant_tag(variant)},
              {"seed", std::to_string(seed)},
              {"encoder_seed", std::to_string(config.encoder.encoder_seed)},
              {"detector_seed", std::to_string(config.encoder.detector_seed)}});
  return result;
}

std::vector<std::pair<double, EvalReport>> sweep_crop(const Dataset& dataset,
                                                      const std::vector<double>& sizes,
                                                      const PipelineConfig& config,
                                                      std::uint64_t seed) {
  if (sizes.empty()) throw std::invalid_argument("sweep_crop: no sizes given");
  std::vector<std::pair<double, EvalReport>> rows;
  for (double b : sizes) {
    PipelineConfig cfg = config;
    cfg.crop_half_size = b;
    rows.emplace_back(b, ablate(Variant::full, dataset, cfg, seed).report);
  }
  return rows;
}

std::vector<VideoHistogram> dataset_cosine_histograms(const Dataset& dataset,
                                                      const EncoderStack& encoders,
                                                      double crop_half_size, std::size_t bins) {
  if (dataset.videos.empty()) throw std::invalid_argument("cosine histogram: empty dataset");
  std::vector<VideoHistogram> out;
  out.reserve(dataset.videos.size());
  for (const auto& video : dataset.videos) {
    const auto embeddings = frame_embeddings(*video, video->scanpath, encoders, crop_half_size);
    out.push_back({video->id, cosine_histogram(embeddings, bins)});
  }
  return out;
}

namespace {

std::string metric_str(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

}  // namespace

void write_results_csv(const std::string& path, const std::vector<EvalReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open results csv for writing: " + path);
  out << "variant,fraction,seed,acc,iou,leven,sr,n\n";
  for (const EvalReport& r : reports) {
    out << r.variant << "," << metric_str(r.input_fraction) << "," << r.seed << ","
        << metric_str(r.accuracy) << "," << metric_str(r.iou) << "," << metric_str(r.levenshtein)
        << "," << metric_str(r.success_rate) << "," << r.sample_count << "\n";
  }
}

void write_train_log_csv(const std::string& path, const std::vector<TrainLogRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open train log for writing: " + path);
  out << "epoch,total_loss,activity_loss,action_loss\n";
  for (const TrainLogRow& r : rows) {
    out << r.epoch << "," << metric_str(r.total_loss) << "," << metric_str(r.activity_loss) << ","
        << metric_str(r.action_loss) << "\n";
  }
}

void write_sweep_csv(const std::string& path,
                     const std::vector<std::pair<double, EvalReport>>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open sweep csv for writing: " + path);
  out << "crop_size,variant,fraction,seed,acc,iou,leven,sr,n\n";
  for (const auto& [b, r] : rows) {
    out << metric_str(b) << "," << r.variant << "," << metric_str(r.input_fraction) << ","
        << r.seed << "," << metric_str(r.accuracy) << "," << metric_str(r.iou) << ","
        << metric_str(r.levenshtein) << "," << metric_str(r.success_rate) << ","
        << r.sample_count << "\n";
  }
}

void write_histogram_csv(const std::string& path,
                         const std::vector<VideoHistogram>& histograms) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open histogram csv for writing: " + path);
  out << "video,bin_low,bin_high,count\n";
  for (const VideoHistogram& h : histograms) {
    const double width = 2.0 / static_cast<double>(h.counts.size());
    for (std::size_t b = 0; b < h.counts.size(); ++b) {
      out << h.video_id << "," << metric_str(-1.0 + width * static_cast<double>(b)) << ","
          << metric_str(-1.0 + width * static_cast<double>(b + 1)) << "," << h.counts[b] << "\n";
    }
  }
}

}  // namespace gazegraph
