// Python bindings for the main pipeline operations: fixation filtering,
// graph construction, the prediction metrics, the synthetic world, and a
// one-call train/evaluate driver for small experiments.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>

#include "gazegraph/config.hpp"
#include "gazegraph/metrics.hpp"
#include "gazegraph/model.hpp"
#include "gazegraph/rng.hpp"
#include "gazegraph/world.hpp"

namespace py = pybind11;
using namespace gazegraph;

namespace {

ScreenGeometry geometry_from_dict(const py::dict& d) {
  ScreenGeometry g;
  if (d.contains("width_px")) g.width_px = d["width_px"].cast<double>();
  if (d.contains("height_px")) g.height_px = d["height_px"].cast<double>();
  if (d.contains("physical_width_mm")) g.physical_width_mm = d["physical_width_mm"].cast<double>();
  if (d.contains("viewing_distance_mm"))
    g.viewing_distance_mm = d["viewing_distance_mm"].cast<double>();
  return g;
}

RunConfig config_from_overrides(const std::map<std::string, std::string>& overrides) {
  RunConfig cfg;
  for (const auto& [k, v] : overrides) apply_override(cfg, k + "=" + v);
  return cfg;
}

py::dict report_to_dict(const EvalReport& r) {
  py::dict d;
  d["variant"] = r.variant;
  d["fraction"] = r.input_fraction;
  d["seed"] = r.seed;
  d["accuracy"] = r.accuracy;
  d["iou"] = r.iou;
  d["levenshtein"] = r.levenshtein;
  d["success_rate"] = r.success_rate;
  d["n"] = r.sample_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_gazegraph, m) {
  m.doc() = "gaze-guided activity recognition and action anticipation";

  m.def(
      "ivt_filter",
      [](const std::vector<std::tuple<double, double, double, bool>>& samples,
         double velocity_threshold, py::dict geometry, double min_duration_ms) {
        std::vector<GazeSample> gs;
        gs.reserve(samples.size());
        for (const auto& [t, x, y, valid] : samples) gs.push_back({t, x, y, valid});
        const auto fx =
            ivt_filter(gs, velocity_threshold, geometry_from_dict(geometry), min_duration_ms);
        std::vector<std::tuple<double, double, double, double>> out;
        out.reserve(fx.size());
        for (const Fixation& f : fx) out.emplace_back(f.start_ms, f.end_ms, f.cx, f.cy);
        return out;
      },
      py::arg("samples"), py::arg("velocity_threshold") = 30.0,
      py::arg("geometry") = py::dict(), py::arg("min_duration_ms") = 60.0,
      "I-VT fixation filtering over (timestamp_ms, x, y, valid) samples");

  m.def(
      "assign_per_frame",
      [](const std::vector<std::tuple<double, double, double, double>>& fixations,
         const std::vector<double>& frame_times_ms) {
        std::vector<Fixation> fx;
        fx.reserve(fixations.size());
        for (const auto& [s, e, cx, cy] : fixations) fx.push_back({s, e, cx, cy});
        const FrameFixationTrack track = assign_per_frame(fx, frame_times_ms);
        std::vector<std::pair<double, double>> out;
        for (std::size_t i = 0; i < track.size(); ++i) out.emplace_back(track.x[i], track.y[i]);
        return out;
      },
      py::arg("fixations"), py::arg("frame_times_ms"),
      "one fixation per frame: overlap wins, gaps inherit the previous fixation");

  m.def(
      "action_iou",
      [](const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred) {
        return action_iou(gold, pred);
      },
      py::arg("gold"), py::arg("pred"));

  m.def(
      "norm_levenshtein",
      [](const std::vector<std::size_t>& gold, const std::vector<std::size_t>& pred) {
        return norm_levenshtein(gold, pred);
      },
      py::arg("gold"), py::arg("pred"));

  m.def(
      "build_graph",
      [](const std::vector<std::vector<double>>& embeddings,
         const std::vector<std::string>& labels, double merge_threshold) {
        std::vector<Tensor> emb;
        emb.reserve(embeddings.size());
        for (const auto& e : embeddings) emb.push_back(Tensor::vector(e));
        Vocabulary vocab = default_vocabulary();
        for (const std::string& l : labels)
          if (!vocab.contains(l))
            throw std::invalid_argument("label not in the default vocabulary: " + l);
        ScriptedEncoders encoders(emb, labels, vocab, 16);
        FrameFixationTrack track;
        track.x.assign(embeddings.size(), 0.0);
        track.y.assign(embeddings.size(), 0.0);

        // minimal scene: the scripted encoders ignore it
        struct NullScene : SceneOracle {
          std::string id = "scripted";
          std::size_t frames;
          ScreenGeometry geom;
          const std::string& video_id() const override { return id; }
          std::size_t frame_count() const override { return frames; }
          const ScreenGeometry& geometry() const override { return geom; }
          std::string label_at(std::size_t, double, double) const override { return "wall"; }
          std::vector<std::string> labels_in_frame(std::size_t) const override {
            return {"wall"};
          }
          std::pair<double, double> agent_center(std::size_t) const override {
            return {0.0, 0.0};
          }
        } scene;
        scene.frames = embeddings.size();

        GraphBuildOptions opts;
        opts.merge_threshold = merge_threshold;
        const ActivityGraph g = build_graph(scene, track, encoders, opts);

        py::dict out;
        py::list nodes, edges;
        for (const GraphNode& n : g.nodes) {
          py::dict nd;
          nd["object"] = n.fixated_object;
          nd["member_frames"] = n.member_frames;
          nd["creation_frame"] = n.creation_frame;
          nodes.append(nd);
        }
        for (const GraphEdge& e : g.edges) edges.append(py::make_tuple(e.src, e.dst));
        out["nodes"] = nodes;
        out["edges"] = edges;
        return out;
      },
      py::arg("embeddings"), py::arg("labels"), py::arg("merge_threshold") = 0.9,
      "frame embeddings + per-frame labels -> merged activity graph (node/edge structure)");

  m.def(
      "generate_dataset",
      [](const std::map<std::string, std::string>& overrides, std::uint64_t seed,
         const std::optional<std::string>& out_dir) {
        const RunConfig cfg = config_from_overrides(overrides);
        const Dataset ds = generate_dataset(cfg.dataset_config(), seed);
        if (out_dir) write_manifest(*out_dir, ds);
        py::dict d;
        d["videos"] = ds.videos.size();
        d["train"] = ds.train_indices.size();
        d["test"] = ds.test_indices.size();
        d["activities"] = ds.activity_names;
        d["action_vocab"] = ds.action_vocab.size();
        double mean_len = 0.0;
        for (const auto& v : ds.videos) mean_len += static_cast<double>(v->program.size());
        d["mean_program_length"] = mean_len / static_cast<double>(ds.videos.size());
        return d;
      },
      py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("seed") = 0,
      py::arg("out_dir") = std::nullopt,
      "generate the synthetic dataset; optionally write manifest + programs");

  m.def(
      "execute_program",
      [](const std::vector<std::string>& lines, const std::map<std::string, std::string>&,
         std::uint64_t seed) {
        // runs the program against a fresh instance of its activity's world:
        // the first matching template initial state is used
        const DatasetConfig cfg;
        const Dataset ds = generate_dataset(
            [] {
              DatasetConfig c;
              c.activity_count = activity_template_count();
              c.cameras_per_activity = 2;
              c.videos_per_pair = 1;
              return c;
            }(),
            seed);
        std::vector<AtomicAction> program;
        program.reserve(lines.size());
        for (const std::string& l : lines) program.push_back(parse_action(l));
        // execute against the first video world of each activity until one accepts
        for (const auto& v : ds.videos) {
          const ExecResult r = execute(program, v->initial_state);
          if (r.success) {
            py::dict d;
            d["success"] = true;
            d["activity_world"] = v->activity_name;
            return d;
          }
        }
        const ExecResult r = execute(program, ds.videos.front()->initial_state);
        py::dict d;
        d["success"] = false;
        d["failed_index"] = r.failed_index;
        d["reason"] = r.reason;
        return d;
      },
      py::arg("lines"), py::arg("options") = std::map<std::string, std::string>{},
      py::arg("seed") = 0, "parse and execute 'verb object [object2]' lines symbolically");

  m.def(
      "train_and_evaluate",
      [](const std::map<std::string, std::string>& overrides, std::uint64_t seed) {
        const RunConfig cfg = config_from_overrides(overrides);
        const Dataset ds = generate_dataset(cfg.dataset_config(), seed_for(cfg.seed, "dataset"));
        const AblationResult r = ablate(parse_variant(cfg.variant), ds, cfg.pipeline_config(),
                                        seed == 0 ? cfg.seed : seed);
        return report_to_dict(r.report);
      },
      py::arg("overrides") = std::map<std::string, std::string>{}, py::arg("seed") = 0,
      "end-to-end train + evaluate on a synthetic dataset, returns the metrics report");

  m.attr("__version__") = "0.1.0";
}
