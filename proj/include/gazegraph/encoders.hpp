#ifndef GAZEGRAPH_ENCODERS_HPP
#define GAZEGRAPH_ENCODERS_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gazegraph/gaze.hpp"
#include "gazegraph/tensor.hpp"

namespace gazegraph {

/// Fixed object-class vocabulary. Labels index into the list; membership is
/// validated at the boundaries.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool contains(const std::string& label) const { return index_.count(label) > 0; }
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> index_;
};

/// The 38 household object classes used by the synthetic world (includes the
/// background classes wall/floor and the agent).
const Vocabulary& default_vocabulary();

/// Square crop request around a fixation point.
struct PatchSpec {
  std::size_t frame = 0;
  double cx = 0.0;
  double cy = 0.0;
  double half_size = 75.0;  // B, pixels
};

/// What a frame "contains", abstracted away from pixels: the world exposes
/// which object class lies under any screen coordinate.
class SceneOracle {
 public:
  virtual ~SceneOracle() = default;
  virtual const std::string& video_id() const = 0;
  virtual std::size_t frame_count() const = 0;
  virtual const ScreenGeometry& geometry() const = 0;
  /// Object class under the pixel; every coordinate inside the screen maps
  /// to some class (background included).
  virtual std::string label_at(std::size_t frame, double x, double y) const = 0;
  /// Distinct classes visible in the frame, for whole-frame encoding.
  virtual std::vector<std::string> labels_in_frame(std::size_t frame) const = 0;
  /// Screen location of the acting agent in the frame.
  virtual std::pair<double, double> agent_center(std::size_t frame) const = 0;
};

/// Visual encoder f(.), object detector, and semantic label encoder behind
/// one interface so graph construction does not care which backend is live.
class EncoderStack {
 public:
  virtual ~EncoderStack() = default;
  virtual Tensor encode_patch(const SceneOracle& scene, const PatchSpec& patch) const = 0;
  virtual Tensor encode_frame(const SceneOracle& scene, std::size_t frame) const = 0;
  virtual std::string detect_object(const SceneOracle& scene, const PatchSpec& patch) const = 0;
  virtual Tensor encode_label(const std::string& label) const;
  virtual const Vocabulary& vocabulary() const = 0;
  virtual std::size_t node_dim() const = 0;
  /// Dimension of one label embedding; edge attributes are twice this.
  virtual std::size_t label_dim() const = 0;
};

/// Deterministic unit vector derived from the label string alone, so two
/// runs (and two processes) agree on every label embedding.
Tensor semantic_embedding(const std::string& label, std::size_t dim);

struct EncoderParams {
  std::size_t node_dim = 512;      // d1
  std::size_t label_dim = 300;     // d2 = 2 * label_dim
  double alpha = 1.0;              // object identity weight
  double beta = 0.5;               // spatial grid cell weight
  double gamma = 0.1;              // seeded noise weight
  std::size_t grid_cols = 6;
  std::size_t grid_rows = 4;
  double detector_accuracy = 0.72;  // q
  std::uint64_t encoder_seed = 1;
  std::uint64_t detector_seed = 2;
};

/// Synthetic stand-in encoders: the patch embedding mixes a per-object basis
/// vector, a per-grid-cell basis vector and seeded noise, then normalizes.
/// The detector returns the true class under the patch center with
/// probability q and a uniformly wrong class otherwise.
class SyntheticEncoders : public EncoderStack {
 public:
  SyntheticEncoders(const Vocabulary& vocab, EncoderParams params);

  Tensor encode_patch(const SceneOracle& scene, const PatchSpec& patch) const override;
  Tensor encode_frame(const SceneOracle& scene, std::size_t frame) const override;
  std::string detect_object(const SceneOracle& scene, const PatchSpec& patch) const override;
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t node_dim() const override { return params_.node_dim; }
  std::size_t label_dim() const override { return params_.label_dim; }

  const EncoderParams& params() const { return params_; }
  std::size_t grid_cell(double x, double y, const ScreenGeometry& g) const;
  Tensor object_basis(const std::string& label) const;
  Tensor cell_basis(std::size_t cell) const;

 private:
  void check_patch(const SceneOracle& scene, const PatchSpec& patch) const;
  Vocabulary vocab_;
  EncoderParams params_;
};

/// Frame-keyed scripted encoders: embeddings and labels are supplied up
/// front, one per frame. Used to drive graph construction from externally
/// computed sequences (tests, bindings) without a scene.
class ScriptedEncoders : public EncoderStack {
 public:
  ScriptedEncoders(std::vector<Tensor> frame_embeddings, std::vector<std::string> frame_labels,
                   const Vocabulary& vocab, std::size_t label_dim = 300);

  Tensor encode_patch(const SceneOracle& scene, const PatchSpec& patch) const override;
  Tensor encode_frame(const SceneOracle& scene, std::size_t frame) const override;
  std::string detect_object(const SceneOracle& scene, const PatchSpec& patch) const override;
  const Vocabulary& vocabulary() const override { return vocab_; }
  std::size_t node_dim() const override;
  std::size_t label_dim() const override { return label_dim_; }

 private:
  std::vector<Tensor> embeddings_;
  std::vector<std::string> labels_;
  Vocabulary vocab_;
  std::size_t label_dim_;
};

/// Precomputed embedding table keyed by (video id, frame index); lets real
/// encoder outputs replace the synthetic ones behind the same interface.
struct EmbeddingTable {
  std::size_t dim = 0;
  Vocabulary vocab;
  std::map<std::string, Tensor> label_vectors;  // optional real word vectors
  std::map<std::pair<std::string, std::size_t>, std::pair<Tensor, std::string>> records;
};

void write_embedding_table(const std::string& path, const EmbeddingTable& table);
EmbeddingTable load_precomputed(const std::string& path);

class PrecomputedEncoders : public EncoderStack {
 public:
  PrecomputedEncoders(EmbeddingTable table, std::size_t label_dim = 300);

  Tensor encode_patch(const SceneOracle& scene, const PatchSpec& patch) const override;
  Tensor encode_frame(const SceneOracle& scene, std::size_t frame) const override;
  std::string detect_object(const SceneOracle& scene, const PatchSpec& patch) const override;
  Tensor encode_label(const std::string& label) const override;
  const Vocabulary& vocabulary() const override { return table_.vocab; }
  std::size_t node_dim() const override { return table_.dim; }
  std::size_t label_dim() const override { return label_dim_; }

  Tensor label_embedding(const std::string& label) const;

 private:
  const std::pair<Tensor, std::string>& lookup(const SceneOracle& scene,
                                               std::size_t frame) const;
  EmbeddingTable table_;
  std::size_t label_dim_;
};

}  // namespace gazegraph

#endif  // GAZEGRAPH_ENCODERS_HPP
