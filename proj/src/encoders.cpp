#include "gazegraph/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "gazegraph/checkpoint.hpp"
#include "gazegraph/rng.hpp"

namespace gazegraph {

Vocabulary::Vocabulary(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw std::invalid_argument("duplicate vocabulary label: " + labels_[i]);
  }
}

std::size_t Vocabulary::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw std::out_of_range("label not in vocabulary: '" + label + "'");
  return it->second;
}

const Vocabulary& default_vocabulary() {
  static const Vocabulary vocab({
      "wall",      "floor",    "character", "fork",       "knife",     "spoon",
      "plate",     "glass",    "mug",       "cereal",     "milk",      "bread",
      "fridge",    "cabinet",  "table",     "sink",       "stove",     "coffeemaker",
      "toaster",   "kettle",   "book",      "bookshelf",  "sofa",      "tv",
      "remote",    "computer", "keyboard",  "desk",       "chair",     "phone",
      "lamp",      "bed",      "pillow",    "wardrobe",   "mirror",    "toothbrush",
      "toilet",    "towel",
  });
  return vocab;
}

namespace {

Tensor unit_gaussian(Rng& rng, std::size_t dim) {
  Tensor t({dim});
  for (double& x : t.data) x = rng.gaussian();
  const double n = t.norm();
  if (n > 0.0)
    for (double& x : t.data) x /= n;
  return t;
}

void normalize_in_place(Tensor& t) {
  const double n = t.norm();
  if (n > 0.0)
    for (double& x : t.data) x /= n;
}

}  // namespace

Tensor EncoderStack::encode_label(const std::string& label) const {
  if (!vocabulary().contains(label))
    throw std::out_of_range("encode_label: label not in vocabulary: '" + label + "'");
  return semantic_embedding(label, label_dim());
}

Tensor semantic_embedding(const std::string& label, std::size_t dim) {
  Rng rng(mix_seed(fnv1a64("semantic"), fnv1a64(label)));
  return unit_gaussian(rng, dim);
}

SyntheticEncoders::SyntheticEncoders(const Vocabulary& vocab, EncoderParams params)
    : vocab_(vocab), params_(params) {}

std::size_t SyntheticEncoders::grid_cell(double x, double y, const ScreenGeometry& g) const {
  const double fx = std::clamp(x, 0.0, g.width_px - 1.0) / g.width_px;
  const double fy = std::clamp(y, 0.0, g.height_px - 1.0) / g.height_px;
  const std::size_t col =
      std::min(params_.grid_cols - 1, static_cast<std::size_t>(fx * params_.grid_cols));
  const std::size_t row =
      std::min(params_.grid_rows - 1, static_cast<std::size_t>(fy * params_.grid_rows));
  return row * params_.grid_cols + col;
}

Tensor SyntheticEncoders::object_basis(const std::string& label) const {
  Rng rng(mix_seed(seed_for(params_.encoder_seed, "object-basis"), fnv1a64(label)));
  return unit_gaussian(rng, params_.node_dim);
}

Tensor SyntheticEncoders::cell_basis(std::size_t cell) const {
  Rng rng(seed_for(params_.encoder_seed, "cell-basis", cell));
  return unit_gaussian(rng, params_.node_dim);
}

void SyntheticEncoders::check_patch(const SceneOracle& scene, const PatchSpec& patch) const {
  const ScreenGeometry& g = scene.geometry();
  if (patch.half_size <= 0.0) throw std::invalid_argument("patch half-size must be positive");
  if (patch.frame >= scene.frame_count())
    throw std::out_of_range("patch frame " + std::to_string(patch.frame) + " out of range");
  if (patch.cx + patch.half_size < 0.0 || patch.cx - patch.half_size >= g.width_px ||
      patch.cy + patch.half_size < 0.0 || patch.cy - patch.half_size >= g.height_px)
    throw std::out_of_range("patch fully outside the frame");
}

Tensor SyntheticEncoders::encode_patch(const SceneOracle& scene, const PatchSpec& patch) const {
  check_patch(scene, patch);
  const ScreenGeometry& g = scene.geometry();
  const double cx = std::clamp(patch.cx, 0.0, g.width_px - 1.0);
  const double cy = std::clamp(patch.cy, 0.0, g.height_px - 1.0);
  const std::string label = scene.label_at(patch.frame, cx, cy);

  Tensor v = object_basis(label);
  for (double& x : v.data) x *= params_.alpha;
  const Tensor cell = cell_basis(grid_cell(cx, cy, g));
  for (std::size_t i = 0; i < v.size(); ++i) v.data[i] += params_.beta * cell.data[i];

  Rng noise_rng(mix_seed(
      mix_seed(seed_for(params_.encoder_seed, "patch-noise", fnv1a64(scene.video_id())),
               static_cast<std::uint64_t>(patch.frame)),
      mix_seed(static_cast<std::uint64_t>(std::llround(cx)),
               static_cast<std::uint64_t>(std::llround(cy)))));
  const Tensor noise = unit_gaussian(noise_rng, params_.node_dim);
  for (std::size_t i = 0; i < v.size(); ++i) v.data[i] += params_.gamma * noise.data[i];
  normalize_in_place(v);
  return v;
}

Tensor SyntheticEncoders::encode_frame(const SceneOracle& scene, std::size_t frame) const {
  if (frame >= scene.frame_count())
    throw std::out_of_range("frame " + std::to_string(frame) + " out of range");
  const std::vector<std::string> labels = scene.labels_in_frame(frame);
  if (labels.empty()) throw std::invalid_argument("encode_frame: empty frame");
  Tensor v({params_.node_dim});
  for (const std::string& label : labels) {
    const Tensor b = object_basis(label);
    for (std::size_t i = 0; i < v.size(); ++i) v.data[i] += b.data[i];
  }
  for (double& x : v.data) x *= params_.alpha / static_cast<double>(labels.size());

  const auto [ax, ay] = scene.agent_center(frame);
  const Tensor cell = cell_basis(grid_cell(ax, ay, scene.geometry()));
  for (std::size_t i = 0; i < v.size(); ++i) v.data[i] += params_.beta * cell.data[i];

  Rng noise_rng(mix_seed(seed_for(params_.encoder_seed, "frame-noise", fnv1a64(scene.video_id())),
                         static_cast<std::uint64_t>(frame)));
  const Tensor noise = unit_gaussian(noise_rng, params_.node_dim);
  for (std::size_t i = 0; i < v.size(); ++i) v.data[i] += params_.gamma * noise.data[i];
  normalize_in_place(v);
  return v;
}

std::string SyntheticEncoders::detect_object(const SceneOracle& scene,
                                             const PatchSpec& patch) const {
  check_patch(scene, patch);
  const ScreenGeometry& g = scene.geometry();
  const double cx = std::clamp(patch.cx, 0.0, g.width_px - 1.0);
  const double cy = std::clamp(patch.cy, 0.0, g.height_px - 1.0);
  const std::string truth = scene.label_at(patch.frame, cx, cy);
  if (params_.detector_accuracy >= 1.0 || vocab_.size() < 2) return truth;

  Rng rng(mix_seed(
      mix_seed(seed_for(params_.detector_seed, "detector", fnv1a64(scene.video_id())),
               static_cast<std::uint64_t>(patch.frame)),
      mix_seed(static_cast<std::uint64_t>(std::llround(cx)),
               static_cast<std::uint64_t>(std::llround(cy)))));
  if (rng.uniform() < params_.detector_accuracy) return truth;
  // uniformly wrong label
  const std::size_t truth_idx = vocab_.index_of(truth);
  std::size_t pick = rng.index(vocab_.size() - 1);
  if (pick >= truth_idx) ++pick;
  return vocab_.label(pick);
}

ScriptedEncoders::ScriptedEncoders(std::vector<Tensor> frame_embeddings,
                                   std::vector<std::string> frame_labels,
                                   const Vocabulary& vocab, std::size_t label_dim)
    : embeddings_(std::move(frame_embeddings)),
      labels_(std::move(frame_labels)),
      vocab_(vocab),
      label_dim_(label_dim) {
  if (embeddings_.size() != labels_.size())
    throw std::invalid_argument("scripted encoders: embedding/label count mismatch");
  if (embeddings_.empty()) throw std::invalid_argument("scripted encoders: empty script");
}

Tensor ScriptedEncoders::encode_patch(const SceneOracle&, const PatchSpec& patch) const {
  if (patch.frame >= embeddings_.size())
    throw std::out_of_range("scripted encoders: frame out of range");
  return embeddings_[patch.frame];
}

Tensor ScriptedEncoders::encode_frame(const SceneOracle&, std::size_t frame) const {
  if (frame >= embeddings_.size())
    throw std::out_of_range("scripted encoders: frame out of range");
  return embeddings_[frame];
}

std::string ScriptedEncoders::detect_object(const SceneOracle&, const PatchSpec& patch) const {
  if (patch.frame >= labels_.size())
    throw std::out_of_range("scripted encoders: frame out of range");
  return labels_[patch.frame];
}

std::size_t ScriptedEncoders::node_dim() const { return embeddings_.front().size(); }

void write_embedding_table(const std::string& path, const EmbeddingTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open embedding table for writing: " + path);
  out << "gazegraph-embeddings v1\n";
  out << "dim " << table.dim << "\n";
  out << "vocabulary " << table.vocab.size() << "\n";
  for (const std::string& label : table.vocab.labels()) {
    auto it = table.label_vectors.find(label);
    if (it == table.label_vectors.end()) {
      out << "label " << label << " 0\n";
    } else {
      out << "label " << label << " " << it->second.size();
      for (double x : it->second.data) out << " " << format_double(x);
      out << "\n";
    }
  }
  out << "records " << table.records.size() << "\n";
  for (const auto& [key, entry] : table.records) {
    out << "record " << key.first << " " << key.second << " " << entry.second << "\n";
    for (std::size_t i = 0; i < entry.first.size(); ++i) {
      if (i) out << " ";
      out << format_double(entry.first.data[i]);
    }
    out << "\n";
  }
  out << "end\n";
}

EmbeddingTable load_precomputed(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embedding table: " + path);
  std::string magic, version, tag;
  in >> magic >> version;
  if (magic != "gazegraph-embeddings" || version != "v1")
    throw std::runtime_error("bad embedding table header in " + path);
  EmbeddingTable table;
  std::size_t n = 0;
  in >> tag >> table.dim;
  if (tag != "dim") throw std::runtime_error("embedding table: expected dim");
  in >> tag >> n;
  if (tag != "vocabulary") throw std::runtime_error("embedding table: expected vocabulary");
  std::vector<std::string> labels(n);
  std::map<std::string, Tensor> label_vectors;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t vdim = 0;
    in >> tag >> labels[i] >> vdim;
    if (tag != "label") throw std::runtime_error("embedding table: expected label entry");
    if (vdim > 0) {
      Tensor v({vdim});
      for (std::size_t j = 0; j < vdim; ++j) in >> v.data[j];
      label_vectors.emplace(labels[i], std::move(v));
    }
  }
  table.vocab = Vocabulary(std::move(labels));
  table.label_vectors = std::move(label_vectors);
  in >> tag >> n;
  if (tag != "records") throw std::runtime_error("embedding table: expected records");
  for (std::size_t i = 0; i < n; ++i) {
    std::string video, label;
    std::size_t frame = 0;
    in >> tag >> video >> frame >> label;
    if (tag != "record") throw std::runtime_error("embedding table: expected record entry");
    if (!table.vocab.contains(label))
      throw std::runtime_error("embedding table: record label '" + label +
                               "' not in the declared vocabulary");
    Tensor v({table.dim});
    for (std::size_t j = 0; j < table.dim; ++j) in >> v.data[j];
    if (!in)
      throw std::runtime_error("embedding table: truncated or non-numeric vector for (" + video +
                               ", " + std::to_string(frame) + "); expected dimension " +
                               std::to_string(table.dim));
    table.records.emplace(std::make_pair(video, frame), std::make_pair(std::move(v), label));
  }
  in >> tag;
  if (tag != "end") throw std::runtime_error("embedding table: missing end marker");
  return table;
}

PrecomputedEncoders::PrecomputedEncoders(EmbeddingTable table, std::size_t label_dim)
    : table_(std::move(table)), label_dim_(label_dim) {}

const std::pair<Tensor, std::string>& PrecomputedEncoders::lookup(const SceneOracle& scene,
                                                                  std::size_t frame) const {
  auto it = table_.records.find({scene.video_id(), frame});
  if (it == table_.records.end())
    throw std::out_of_range("no precomputed embedding for (" + scene.video_id() + ", " +
                            std::to_string(frame) + ")");
  return it->second;
}

Tensor PrecomputedEncoders::encode_patch(const SceneOracle& scene, const PatchSpec& patch) const {
  return lookup(scene, patch.frame).first;
}

Tensor PrecomputedEncoders::encode_frame(const SceneOracle& scene, std::size_t frame) const {
  return lookup(scene, frame).first;
}

std::string PrecomputedEncoders::detect_object(const SceneOracle& scene,
                                               const PatchSpec& patch) const {
  return lookup(scene, patch.frame).second;
}

Tensor PrecomputedEncoders::label_embedding(const std::string& label) const {
  auto it = table_.label_vectors.find(label);
  if (it != table_.label_vectors.end()) {
    if (it->second.size() != label_dim_)
      throw std::runtime_error("label vector for '" + label + "' has dimension " +
                               std::to_string(it->second.size()) + ", expected " +
                               std::to_string(label_dim_));
    return it->second;
  }
  return EncoderStack::encode_label(label);
}

Tensor PrecomputedEncoders::encode_label(const std::string& label) const {
  if (!vocabulary().contains(label))
    throw std::out_of_range("encode_label: label not in vocabulary: '" + label + "'");
  return label_embedding(label);
}

}  // namespace gazegraph
