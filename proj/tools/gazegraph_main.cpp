// Command-line driver: dataset generation, graph building, training,
// evaluation, ablations, crop-size sweeps, graph export, and the cosine
// histogram. Every command echoes its resolved configuration and artifact
// hashes into a run-manifest under the output directory.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gazegraph/checkpoint.hpp"
#include "gazegraph/config.hpp"
#include "gazegraph/metrics.hpp"
#include "gazegraph/model.hpp"
#include "gazegraph/rng.hpp"
#include "gazegraph/world.hpp"

namespace fs = std::filesystem;
using namespace gazegraph;

namespace {

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out = "runs/out";
  bool has_seed = false;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "key = value config file");
  cmd->add_option("--set", args.overrides, "override a config key (key=value), repeatable");
  cmd->add_option("--out", args.out, "output directory");
  cmd->add_option("--seed", args.seed, "global seed (overrides config)")
      ->each([&args](const std::string&) { args.has_seed = true; });
}

RunConfig resolve(const CommonArgs& args) {
  RunConfig cfg;
  if (!args.config_path.empty()) cfg = load_config_file(args.config_path);
  apply_env_overrides(cfg);
  for (const std::string& o : args.overrides) apply_override(cfg, o);
  if (args.has_seed) cfg.seed = args.seed;
  return cfg;
}

fs::path ensure_out(const CommonArgs& args) {
  fs::path out(args.out);
  fs::create_directories(out);
  return out;
}

void finish(const fs::path& out, const std::string& command, const RunConfig& cfg,
            const std::vector<std::string>& artifacts) {
  write_run_manifest((out / "run-manifest.txt").string(), command, cfg, artifacts);
}

int cmd_gen_data(const CommonArgs& args) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = generate_dataset(cfg.dataset_config(), seed_for(cfg.seed, "dataset"));
  write_manifest(out.string(), ds);
  std::cout << "generated " << ds.videos.size() << " videos (" << ds.train_indices.size()
            << " train / " << ds.test_indices.size() << " test), " << ds.action_vocab.size()
            << " atomic actions\n";
  finish(out, "gen-data", cfg, {(out / "manifest.txt").string()});
  return 0;
}

int cmd_build_graphs(const CommonArgs& args, const std::string& data_dir) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = load_dataset(data_dir);
  const PipelineConfig pipe = cfg.pipeline_config();
  SyntheticEncoders encoders(default_vocabulary(), pipe.encoder);
  const Variant variant = parse_variant(cfg.variant);

  fs::create_directories(out / "graphs");
  std::vector<std::size_t> all(ds.videos.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto tracks = variant_tracks(ds, all, variant, seed_for(cfg.seed, "tracks"));
  std::vector<std::string> artifacts;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const SyntheticVideo& v = *ds.videos[i];
    const std::size_t frames = std::max<std::size_t>(
        1, static_cast<std::size_t>(cfg.input_fraction * static_cast<double>(v.frame_count())));
    FrameFixationTrack prefix;
    prefix.x.assign(tracks[i].x.begin(), tracks[i].x.begin() + static_cast<long>(frames));
    prefix.y.assign(tracks[i].y.begin(), tracks[i].y.begin() + static_cast<long>(frames));
    GraphBuildOptions opts;
    opts.crop_half_size = pipe.crop_half_size;
    opts.merge_threshold = pipe.merge_threshold;
    opts.node_source = variant == Variant::no_fixation ? NodeSource::whole_frame
                                                       : NodeSource::fixation_patch;
    ActivityGraph g = build_graph(v, prefix, encoders, opts);
    add_self_loops(g, encoders);
    const fs::path path = out / "graphs" / (v.id + ".graph.txt");
    write_graph_text(path.string(), g);
    artifacts.push_back(path.string());
  }
  std::cout << "wrote " << all.size() << " graphs to " << (out / "graphs").string() << "\n";
  finish(out, "build-graphs", cfg, artifacts);
  return 0;
}

int cmd_train(const CommonArgs& args, const std::string& data_dir) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = load_dataset(data_dir);
  const PipelineConfig pipe = cfg.pipeline_config();
  const Variant variant = parse_variant(cfg.variant);

  AblationResult result = ablate(variant, ds, pipe, cfg.seed);
  const fs::path ck_path = out / "checkpoint.txt";
  write_checkpoint(ck_path.string(), result.checkpoint);
  write_train_log_csv((out / "train_log.csv").string(), result.train_log);
  write_results_csv((out / "results.csv").string(), {result.report});
  std::cout << "trained variant=" << variant_tag(variant) << " epochs=" << cfg.epochs
            << " final_loss=" << result.train_log.back().total_loss << "\n"
            << "test: acc=" << result.report.accuracy << " iou=" << result.report.iou
            << " leven=" << result.report.levenshtein << " sr=" << result.report.success_rate
            << "\n";
  finish(out, "train", cfg,
         {ck_path.string(), (out / "train_log.csv").string(), (out / "results.csv").string()});
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& data_dir,
             const std::string& checkpoint_path, const std::string& split) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  if (!fs::exists(checkpoint_path))
    throw std::runtime_error("checkpoint not found: " + checkpoint_path);
  const Dataset ds = load_dataset(data_dir);
  const Checkpoint ck = read_checkpoint(checkpoint_path);

  ModelConfig mc = config_from_checkpoint(ck);
  Model model(mc, 0);
  load_into(ck, model.params());

  PipelineConfig pipe = cfg.pipeline_config();
  // encoder streams must match the ones the checkpoint was trained with
  if (const std::string* es = ck.find_meta("encoder_seed"))
    pipe.encoder.encoder_seed = std::stoull(*es);
  if (const std::string* dspec = ck.find_meta("detector_seed"))
    pipe.encoder.detector_seed = std::stoull(*dspec);
  SyntheticEncoders encoders(default_vocabulary(), pipe.encoder);

  const Variant variant = parse_variant(cfg.variant);
  const auto& indices = split == "train" ? ds.train_indices : ds.test_indices;
  const EvalReport report = evaluate_model(model, ds, indices, variant, pipe, encoders,
                                           cfg.input_fraction, cfg.seed);
  write_results_csv((out / "results.csv").string(), {report});
  std::cout << "eval split=" << split << " variant=" << report.variant
            << " fraction=" << report.input_fraction << ": acc=" << report.accuracy
            << " iou=" << report.iou << " leven=" << report.levenshtein
            << " sr=" << report.success_rate << " n=" << report.sample_count << "\n";
  finish(out, "eval", cfg, {(out / "results.csv").string()});
  return 0;
}

int cmd_ablate(const CommonArgs& args, const std::string& data_dir) {
  return cmd_train(args, data_dir);  // train already honors cfg.variant
}

int cmd_sweep_crop(const CommonArgs& args, const std::string& data_dir) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = load_dataset(data_dir);
  const auto sizes = parse_size_list(cfg.sweep_sizes);
  const auto rows = sweep_crop(ds, sizes, cfg.pipeline_config(), cfg.seed);
  write_sweep_csv((out / "sweep_crop.csv").string(), rows);
  for (const auto& [b, r] : rows)
    std::cout << "B=" << b << ": acc=" << r.accuracy << " iou=" << r.iou
              << " leven=" << r.levenshtein << " sr=" << r.success_rate << "\n";
  finish(out, "sweep-crop", cfg, {(out / "sweep_crop.csv").string()});
  return 0;
}

int cmd_export_graph(const CommonArgs& args, const std::string& data_dir,
                     const std::string& video_id, const std::string& format) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = load_dataset(data_dir);
  const PipelineConfig pipe = cfg.pipeline_config();
  SyntheticEncoders encoders(default_vocabulary(), pipe.encoder);

  const SyntheticVideo* video = nullptr;
  for (const auto& v : ds.videos)
    if (v->id == video_id) video = v.get();
  if (!video) throw std::runtime_error("video id not in dataset: " + video_id);

  const std::size_t frames = std::max<std::size_t>(
      1,
      static_cast<std::size_t>(cfg.input_fraction * static_cast<double>(video->frame_count())));
  FrameFixationTrack prefix;
  prefix.x.assign(video->scanpath.x.begin(), video->scanpath.x.begin() + static_cast<long>(frames));
  prefix.y.assign(video->scanpath.y.begin(), video->scanpath.y.begin() + static_cast<long>(frames));

  GraphBuildOptions opts;
  opts.crop_half_size = pipe.crop_half_size;
  opts.merge_threshold = pipe.merge_threshold;
  ActivityGraph g = build_graph(*video, prefix, encoders, opts);
  add_self_loops(g, encoders);

  std::string artifact;
  if (format == "dot") {
    artifact = (out / (video_id + ".dot")).string();
    write_graph_dot(artifact, g);
  } else if (format == "text") {
    artifact = (out / (video_id + ".graph.txt")).string();
    write_graph_text(artifact, g);
  } else {
    throw std::runtime_error("unknown export format: " + format + " (want dot or text)");
  }
  std::cout << "exported " << video_id << " (" << g.nodes.size() << " nodes, " << g.edges.size()
            << " edges) to " << artifact << "\n";
  finish(out, "export-graph", cfg, {artifact});
  return 0;
}

int cmd_hist(const CommonArgs& args, const std::string& data_dir) {
  const RunConfig cfg = resolve(args);
  const fs::path out = ensure_out(args);
  const Dataset ds = load_dataset(data_dir);
  const PipelineConfig pipe = cfg.pipeline_config();
  SyntheticEncoders encoders(default_vocabulary(), pipe.encoder);
  const auto histograms =
      dataset_cosine_histograms(ds, encoders, pipe.crop_half_size, cfg.histogram_bins);
  write_histogram_csv((out / "cosine_histogram.csv").string(), histograms);
  std::cout << "wrote cosine histograms for " << histograms.size() << " videos\n";
  finish(out, "hist", cfg, {(out / "cosine_histogram.csv").string()});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaze-guided activity recognition and action anticipation"};
  app.require_subcommand(1);

  CommonArgs gen_args, build_args, train_args, eval_args, ablate_args, sweep_args, export_args,
      hist_args;
  std::string data_dir, checkpoint_path, split = "test", video_id, format = "dot";
  std::string variant_flag;

  CLI::App* gen = app.add_subcommand("gen-data", "generate the synthetic dataset");
  add_common(gen, gen_args);

  CLI::App* build = app.add_subcommand("build-graphs", "build and export graphs for a dataset");
  add_common(build, build_args);
  build->add_option("--data", data_dir, "dataset directory")->required();

  CLI::App* train = app.add_subcommand("train", "train a model on the train split");
  add_common(train, train_args);
  train->add_option("--data", data_dir, "dataset directory")->required();

  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  add_common(eval, eval_args);
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--split", split, "train or test split")
      ->check(CLI::IsMember({"train", "test"}));

  CLI::App* abl = app.add_subcommand("ablate", "train and evaluate one ablation variant");
  add_common(abl, ablate_args);
  abl->add_option("--data", data_dir, "dataset directory")->required();
  abl->add_option("--variant", variant_flag, "ablation variant tag");

  CLI::App* sweep = app.add_subcommand("sweep-crop", "train/evaluate across crop sizes");
  add_common(sweep, sweep_args);
  sweep->add_option("--data", data_dir, "dataset directory")->required();
  std::string sizes_flag;
  sweep->add_option("--sizes", sizes_flag, "crop sizes, e.g. --sizes 25,50,75,100");

  CLI::App* exp = app.add_subcommand("export-graph", "export one video's graph (text or DOT)");
  add_common(exp, export_args);
  exp->add_option("--data", data_dir, "dataset directory")->required();
  exp->add_option("--video", video_id, "video id from the dataset manifest")->required();
  exp->add_option("--format", format, "dot or text")->check(CLI::IsMember({"dot", "text"}));

  CLI::App* hist = app.add_subcommand("hist", "pairwise cosine-similarity histograms");
  add_common(hist, hist_args);
  hist->add_option("--data", data_dir, "dataset directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (build->parsed()) return cmd_build_graphs(build_args, data_dir);
    if (train->parsed()) return cmd_train(train_args, data_dir);
    if (eval->parsed()) return cmd_eval(eval_args, data_dir, checkpoint_path, split);
    if (abl->parsed()) {
      if (!variant_flag.empty()) ablate_args.overrides.push_back("variant=" + variant_flag);
      return cmd_ablate(ablate_args, data_dir);
    }
    if (sweep->parsed()) {
      if (!sizes_flag.empty()) sweep_args.overrides.push_back("sweep_sizes=" + sizes_flag);
      return cmd_sweep_crop(sweep_args, data_dir);
    }
    if (exp->parsed()) return cmd_export_graph(export_args, data_dir, video_id, format);
    if (hist->parsed()) return cmd_hist(hist_args, data_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
