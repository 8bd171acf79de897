#include "gazegraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "gazegraph/checkpoint.hpp"
#include "gazegraph/rng.hpp"

namespace gazegraph {

bool ActivityGraph::has_edge(std::size_t src, std::size_t dst) const {
  for (const GraphEdge& e : edges)
    if (e.src == src && e.dst == dst) return true;
  return false;
}

namespace {

Tensor edge_attribute(const ActivityGraph& g, std::size_t src, std::size_t dst,
                      const EncoderStack& encoders) {
  const Tensor a = encoders.encode_label(g.nodes[src].fixated_object);
  const Tensor b = encoders.encode_label(g.nodes[dst].fixated_object);
  Tensor attr({a.size() + b.size()});
  std::copy(a.data.begin(), a.data.end(), attr.data.begin());
  std::copy(b.data.begin(), b.data.end(), attr.data.begin() + a.size());
  return attr;
}

}  // namespace

ActivityGraph build_graph(const SceneOracle& scene, const FrameFixationTrack& track,
                          const EncoderStack& encoders, const GraphBuildOptions& options) {
  const std::size_t frames = track.size();
  if (frames < 1) throw std::invalid_argument("build_graph: need at least one frame");
  if (frames > scene.frame_count())
    throw std::invalid_argument("build_graph: track length " + std::to_string(frames) +
                                " exceeds video frame count " +
                                std::to_string(scene.frame_count()));

  Rng label_rng(options.randomize_seed);
  const Vocabulary& vocab = encoders.vocabulary();

  auto embed = [&](std::size_t t) {
    if (options.node_source == NodeSource::whole_frame) return encoders.encode_frame(scene, t);
    PatchSpec patch{t, track.x[t], track.y[t], options.crop_half_size};
    return encoders.encode_patch(scene, patch);
  };
  auto detect = [&](std::size_t t) {
    if (options.randomize_objects) return vocab.label(label_rng.index(vocab.size()));
    if (options.node_source == NodeSource::whole_frame) {
      const ScreenGeometry& g = scene.geometry();
      PatchSpec patch{t, g.width_px / 2.0, g.height_px / 2.0,
                      std::max(g.width_px, g.height_px) / 2.0};
      return encoders.detect_object(scene, patch);
    }
    PatchSpec patch{t, track.x[t], track.y[t], options.crop_half_size};
    return encoders.detect_object(scene, patch);
  };

  ActivityGraph g;
  g.video_id = scene.video_id();
  g.frame_count = frames;

  g.nodes.push_back({embed(0), detect(0), {0}, 0});
  std::size_t current = 0;

  std::set<std::pair<std::size_t, std::size_t>> seen_edges;
  auto add_edge = [&](std::size_t src, std::size_t dst) {
    if (!seen_edges.emplace(src, dst).second) return;
    g.edges.push_back({src, dst, edge_attribute(g, src, dst, encoders)});
  };

  for (std::size_t t = 1; t < frames; ++t) {
    const Tensor v = embed(t);
    double best = -2.0;
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      const double c = cosine_similarity(g.nodes[i].feature, v);
      if (c > best) {
        best = c;
        best_idx = i;
      }
    }
    if (best < options.merge_threshold) {
      g.nodes.push_back({v, detect(t), {t}, t});
      const std::size_t fresh = g.nodes.size() - 1;
      add_edge(current, fresh);
      current = fresh;
    } else {
      g.nodes[best_idx].member_frames.push_back(t);
      if (best_idx != current) {
        add_edge(current, best_idx);
        current = best_idx;
      }
    }
  }
  return g;
}

void add_self_loops(ActivityGraph& graph, const EncoderStack& encoders) {
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    if (graph.has_edge(i, i)) continue;
    graph.edges.push_back({i, i, edge_attribute(graph, i, i, encoders)});
  }
  graph.has_self_loops = true;
}

void zero_edge_attrs(ActivityGraph& graph) {
  for (GraphEdge& e : graph.edges) e.attr.fill(0.0);
}

std::vector<std::size_t> cosine_histogram(const std::vector<Tensor>& embeddings,
                                          std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("cosine_histogram: bins must be positive");
  std::vector<std::size_t> counts(bins, 0);
  for (std::size_t i = 0; i < embeddings.size(); ++i)
    for (std::size_t j = i + 1; j < embeddings.size(); ++j) {
      const double c = cosine_similarity(embeddings[i], embeddings[j]);
      auto bin = static_cast<std::size_t>(std::clamp((c + 1.0) / 2.0, 0.0, 1.0) *
                                          static_cast<double>(bins));
      if (bin >= bins) bin = bins - 1;
      counts[bin] += 1;
    }
  return counts;
}

std::vector<Tensor> frame_embeddings(const SceneOracle& scene, const FrameFixationTrack& track,
                                     const EncoderStack& encoders, double crop_half_size) {
  std::vector<Tensor> out;
  out.reserve(track.size());
  for (std::size_t t = 0; t < track.size(); ++t)
    out.push_back(encoders.encode_patch(scene, {t, track.x[t], track.y[t], crop_half_size}));
  return out;
}

void write_graph_text(const std::string& path, const ActivityGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open graph file for writing: " + path);
  out << "gazegraph-graph v1\n";
  out << "video " << (graph.video_id.empty() ? "-" : graph.video_id) << "\n";
  out << "frames " << graph.frame_count << "\n";
  out << "selfloops " << (graph.has_self_loops ? 1 : 0) << "\n";
  out << "nodes " << graph.nodes.size() << "\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const GraphNode& n = graph.nodes[i];
    out << "node " << i << " " << n.fixated_object << " " << n.creation_frame << " "
        << n.member_frames.size();
    for (std::size_t f : n.member_frames) out << " " << f;
    out << "\nfeat " << n.feature.size();
    for (double x : n.feature.data) out << " " << format_double(x);
    out << "\n";
  }
  out << "edges " << graph.edges.size() << "\n";
  for (const GraphEdge& e : graph.edges) {
    out << "edge " << e.src << " " << e.dst << "\nattr " << e.attr.size();
    for (double x : e.attr.data) out << " " << format_double(x);
    out << "\n";
  }
  out << "end\n";
}

ActivityGraph read_graph_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  std::string magic, version, tag;
  in >> magic >> version;
  if (magic != "gazegraph-graph" || version != "v1")
    throw std::runtime_error("bad graph file header in " + path);
  ActivityGraph g;
  int selfloops = 0;
  std::size_t n = 0;
  in >> tag >> g.video_id;
  if (tag != "video") throw std::runtime_error("graph file: expected video");
  if (g.video_id == "-") g.video_id.clear();
  in >> tag >> g.frame_count;
  if (tag != "frames") throw std::runtime_error("graph file: expected frames");
  in >> tag >> selfloops;
  if (tag != "selfloops") throw std::runtime_error("graph file: expected selfloops");
  g.has_self_loops = selfloops != 0;
  in >> tag >> n;
  if (tag != "nodes") throw std::runtime_error("graph file: expected nodes");
  g.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t idx = 0, members = 0, dim = 0;
    GraphNode& node = g.nodes[i];
    in >> tag >> idx >> node.fixated_object >> node.creation_frame >> members;
    if (tag != "node" || idx != i) throw std::runtime_error("graph file: bad node entry");
    node.member_frames.resize(members);
    for (std::size_t f = 0; f < members; ++f) in >> node.member_frames[f];
    in >> tag >> dim;
    if (tag != "feat") throw std::runtime_error("graph file: expected feat");
    node.feature = Tensor({dim});
    for (std::size_t d = 0; d < dim; ++d) in >> node.feature.data[d];
  }
  in >> tag >> n;
  if (tag != "edges") throw std::runtime_error("graph file: expected edges");
  g.edges.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    GraphEdge& e = g.edges[i];
    std::size_t dim = 0;
    in >> tag >> e.src >> e.dst;
    if (tag != "edge") throw std::runtime_error("graph file: bad edge entry");
    in >> tag >> dim;
    if (tag != "attr") throw std::runtime_error("graph file: expected attr");
    e.attr = Tensor({dim});
    for (std::size_t d = 0; d < dim; ++d) in >> e.attr.data[d];
  }
  in >> tag;
  if (tag != "end") throw std::runtime_error("graph file: missing end marker");
  if (!in) throw std::runtime_error("graph file: truncated: " + path);
  return g;
}

void write_graph_dot(const std::string& path, const ActivityGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open DOT file for writing: " + path);
  out << "digraph activity {\n";
  out << "  rankdir=LR;\n";
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    out << "  n" << i << " [label=\"" << i << ":" << graph.nodes[i].fixated_object << "\"];\n";
  }
  for (const GraphEdge& e : graph.edges) {
    if (e.src == e.dst) continue;  // self-loops clutter the drawing
    out << "  n" << e.src << " -> n" << e.dst << ";\n";
  }
  out << "}\n";
}

bool graphs_equal(const ActivityGraph& a, const ActivityGraph& b) {
  if (a.video_id != b.video_id || a.frame_count != b.frame_count ||
      a.has_self_loops != b.has_self_loops || a.nodes.size() != b.nodes.size() ||
      a.edges.size() != b.edges.size())
    return false;
  for (std::size_t i = 0; i < a.nodes.size(); ++i) {
    const GraphNode& x = a.nodes[i];
    const GraphNode& y = b.nodes[i];
    if (x.fixated_object != y.fixated_object || x.creation_frame != y.creation_frame ||
        x.member_frames != y.member_frames || x.feature.shape != y.feature.shape ||
        x.feature.data != y.feature.data)
      return false;
  }
  for (std::size_t i = 0; i < a.edges.size(); ++i) {
    const GraphEdge& x = a.edges[i];
    const GraphEdge& y = b.edges[i];
    if (x.src != y.src || x.dst != y.dst || x.attr.shape != y.attr.shape ||
        x.attr.data != y.attr.data)
      return false;
  }
  return true;
}

}  // namespace gazegraph
