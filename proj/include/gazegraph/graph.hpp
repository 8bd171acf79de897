#ifndef GAZEGRAPH_GRAPH_HPP
#define GAZEGRAPH_GRAPH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "gazegraph/encoders.hpp"
#include "gazegraph/gaze.hpp"
#include "gazegraph/tensor.hpp"

namespace gazegraph {

struct GraphNode {
  Tensor feature;                         // v_i, d1
  std::string fixated_object;             // detected at creation
  std::vector<std::size_t> member_frames;  // sorted, 0-based
  std::size_t creation_frame = 0;
};

struct GraphEdge {
  std::size_t src = 0;
  std::size_t dst = 0;
  Tensor attr;  // concat of the two endpoint label embeddings, d2
};

struct ActivityGraph {
  std::string video_id;
  std::size_t frame_count = 0;  // K, frames covered by the graph
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;
  bool has_self_loops = false;

  bool has_edge(std::size_t src, std::size_t dst) const;
};

enum class NodeSource {
  fixation_patch,  // crop around the per-frame fixation point
  whole_frame,     // no-fixation ablation: one full-frame embedding per frame
};

struct GraphBuildOptions {
  double crop_half_size = 75.0;   // B
  double merge_threshold = 0.9;   // rho
  NodeSource node_source = NodeSource::fixation_patch;
  /// When true the fixated object of each node is replaced by a uniformly
  /// random vocabulary label (random-object edge ablation).
  bool randomize_objects = false;
  std::uint64_t randomize_seed = 0;
};

/// Runs the video-to-graph construction over the first track.size() frames:
/// each frame either merges into the most similar existing node (cosine >=
/// rho) or becomes a new node; traversal edges carry concatenated label
/// embeddings of their endpoints. Duplicate (src, dst) pairs are not
/// re-added.
ActivityGraph build_graph(const SceneOracle& scene, const FrameFixationTrack& track,
                          const EncoderStack& encoders, const GraphBuildOptions& options);

/// Adds one self-edge per node with attr = concat(label_i, label_i).
/// Idempotent.
void add_self_loops(ActivityGraph& graph, const EncoderStack& encoders);

/// Zeroes every edge attribute in place (visual-only edge ablation).
void zero_edge_attrs(ActivityGraph& graph);

/// Histogram of pairwise cosine similarities over [-1, 1].
std::vector<std::size_t> cosine_histogram(const std::vector<Tensor>& embeddings,
                                          std::size_t bins);

/// Frame embeddings for one video under the fixation-patch source; feeds
/// cosine_histogram and the merge-threshold diagnostics.
std::vector<Tensor> frame_embeddings(const SceneOracle& scene, const FrameFixationTrack& track,
                                     const EncoderStack& encoders, double crop_half_size);

// Lossless structured-text serialization plus DOT export for inspection.
void write_graph_text(const std::string& path, const ActivityGraph& graph);
ActivityGraph read_graph_text(const std::string& path);
void write_graph_dot(const std::string& path, const ActivityGraph& graph);

bool graphs_equal(const ActivityGraph& a, const ActivityGraph& b);

}  // namespace gazegraph

#endif  // GAZEGRAPH_GRAPH_HPP
