#ifndef GAZEGRAPH_MODEL_HPP
#define GAZEGRAPH_MODEL_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gazegraph/adam.hpp"
#include "gazegraph/checkpoint.hpp"
#include "gazegraph/graph.hpp"
#include "gazegraph/tape.hpp"

namespace gazegraph {

struct ModelConfig {
  std::size_t node_dim = 512;   // d1
  std::size_t edge_dim = 600;   // d2
  std::size_t ecc_layers = 3;
  std::size_t ecc_hidden = 128;
  std::size_t mlp_hidden = 128;
  std::size_t lstm_hidden = 384;
  std::size_t lstm_layers = 2;
  std::size_t activity_classes = 18;  // M1
  std::size_t action_classes = 179;   // M2, last index is EOS
  std::size_t max_decode_len = 24;
  bool autoregressive = false;  // feed the previous token back into the LSTM
  double learning_rate = 1e-3;
  std::size_t epochs = 300;

  std::size_t readout_dim() const { return ecc_layers * ecc_hidden; }
  std::size_t eos_token() const { return action_classes - 1; }
  std::size_t decoder_input_dim() const {
    return readout_dim() + activity_classes + (autoregressive ? action_classes : 0);
  }
};

/// Graph in the form the network consumes: constant node features plus a
/// symmetric neighbor structure with one attribute per (node, neighbor)
/// pair. Self-loops are required.
struct GraphInput {
  std::vector<Tensor> node_features;  // d1 each
  std::vector<std::vector<std::pair<std::size_t, Tensor>>> neighbors;

  std::size_t node_count() const { return node_features.size(); }
};

/// Converts an ActivityGraph (with self-loops) to the network input form.
/// Stored directed edges are treated as undirected; for a pair connected in
/// both directions the earlier edge's attribute wins.
GraphInput to_graph_input(const ActivityGraph& graph);

struct Prediction {
  std::size_t activity = 0;
  std::vector<std::size_t> actions;  // EOS excluded
};

enum class ConditionMode {
  predicted_activity,  // hierarchical inference (default)
  gold_activity,       // teacher forcing during training
  none,                // zero condition vector (flat / no-activity ablations)
};

enum class LossMode {
  joint,        // activity CE + action sequence CE
  action_only,  // no activity supervision
};

/// Edge-conditioned convolution stack with per-layer mean-pool readout,
/// MLP activity head, and an LSTM action decoder conditioned on the
/// activity. All parameters live in one ParamStore for the optimizer and
/// the checkpoint format.
class Model {
 public:
  Model(ModelConfig config, std::uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  /// One ECC layer: v_i = (1/|N(i)|) sum_j reshape(filter(e_ij)) v_j + b.
  std::vector<Var> ecc_forward(Tape& tape, const GraphInput& graph,
                               const std::vector<Var>& node_feats, std::size_t layer) const;

  /// Runs all ECC layers (ReLU between layers, none after the last) and
  /// returns each layer's node features.
  std::vector<std::vector<Var>> ecc_stack(Tape& tape, const GraphInput& graph) const;

  /// Per-layer node means concatenated into v_G.
  Var readout(Tape& tape, const std::vector<std::vector<Var>>& per_layer_feats) const;

  Var activity_head(Tape& tape, Var v_g) const;

  /// Teacher-forced decoder: returns per-step logits for each gold token
  /// plus the EOS step.
  std::vector<Var> decode_teacher_forced(Tape& tape, Var v_g, const Tensor& condition,
                                         const std::vector<std::size_t>& gold_actions) const;

  /// Greedy decoding until EOS or max_len.
  std::vector<std::size_t> decode_greedy(Tape& tape, Var v_g, const Tensor& condition,
                                         std::size_t max_len) const;

  /// Joint loss: CE(activity) + sum of per-step action CEs (EOS included).
  Var joint_loss(Tape& tape, Var activity_logits, std::size_t gold_activity,
                 const std::vector<Var>& step_logits,
                 const std::vector<std::size_t>& gold_actions) const;

  /// Sample loss under the given modes; used by training and the
  /// gradient-check harness. Writes the activity CE component if requested.
  Var sample_loss(Tape& tape, const GraphInput& graph, std::size_t gold_activity,
                  const std::vector<std::size_t>& gold_actions, LossMode loss_mode,
                  ConditionMode condition_mode, double* activity_component = nullptr) const;

  Prediction predict(const GraphInput& graph, ConditionMode condition_mode =
                                                  ConditionMode::predicted_activity) const;

  Tensor onehot(std::size_t index, std::size_t classes) const;

 private:
  struct EccLayer {
    Param* filter_weight;  // [out*in, edge_dim]
    Param* filter_bias;    // [out*in]
    Param* bias;           // [out]
    std::size_t in_dim, out_dim;
  };
  struct LstmLayer {
    Param* wx;  // [4*hidden, input]
    Param* wh;  // [4*hidden, hidden]
    Param* b;   // [4*hidden]
    std::size_t input_dim, hidden_dim;
  };

  std::pair<Var, Var> lstm_cell(Tape& tape, const LstmLayer& layer, Var x, Var h, Var c) const;
  Var decoder_step_input(Tape& tape, Var v_g, Var condition, std::optional<Var> prev_token) const;

  ModelConfig config_;
  ParamStore params_;
  std::vector<EccLayer> ecc_;
  std::vector<LstmLayer> lstm_;
  Param* mlp_w1_ = nullptr;
  Param* mlp_b1_ = nullptr;
  Param* mlp_w2_ = nullptr;
  Param* mlp_b2_ = nullptr;
  Param* out_w_ = nullptr;
  Param* out_b_ = nullptr;
};

struct TrainSample {
  GraphInput graph;
  std::size_t activity = 0;
  std::vector<std::size_t> gold_actions;  // EOS excluded
};

struct TrainOptions {
  LossMode loss_mode = LossMode::joint;
  ConditionMode condition_mode = ConditionMode::gold_activity;
  std::size_t epochs = 300;
  double learning_rate = 1e-3;
  std::function<void(std::size_t, double, double, double)> on_epoch;  // epoch, total, act, action
};

struct TrainLogRow {
  std::size_t epoch;
  double total_loss;
  double activity_loss;
  double action_loss;
};

/// Full-batch Adam training; deterministic given the model's init seed.
/// Aborts with the epoch index if the loss turns non-finite.
std::vector<TrainLogRow> train_model(Model& model, const std::vector<TrainSample>& samples,
                                     const TrainOptions& options);

// Checkpoint glue: parameters plus the metadata needed to rebuild the model.
Checkpoint model_checkpoint(const Model& model,
                            std::vector<std::pair<std::string, std::string>> extra_meta = {});
ModelConfig config_from_checkpoint(const Checkpoint& ck);

}  // namespace gazegraph

#endif  // GAZEGRAPH_MODEL_HPP
