#include "gazegraph/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "gazegraph/rng.hpp"

namespace gazegraph {

GraphInput to_graph_input(const ActivityGraph& graph) {
  if (!graph.has_self_loops)
    throw std::invalid_argument("graph is missing self-loops; run add_self_loops first");
  GraphInput in;
  in.node_features.reserve(graph.nodes.size());
  for (const GraphNode& n : graph.nodes) in.node_features.push_back(n.feature);
  in.neighbors.resize(graph.nodes.size());

  std::map<std::pair<std::size_t, std::size_t>, const Tensor*> attr;
  for (const GraphEdge& e : graph.edges) {
    const auto lo = std::min(e.src, e.dst);
    const auto hi = std::max(e.src, e.dst);
    attr.emplace(std::make_pair(lo, hi), &e.attr);  // first edge wins
  }
  for (const auto& [pair, tensor] : attr) {
    in.neighbors[pair.first].emplace_back(pair.second, *tensor);
    if (pair.first != pair.second) in.neighbors[pair.second].emplace_back(pair.first, *tensor);
  }
  for (std::size_t i = 0; i < in.neighbors.size(); ++i) {
    bool self = false;
    for (const auto& [j, t] : in.neighbors[i])
      if (j == i) self = true;
    if (!self)
      throw std::invalid_argument("node " + std::to_string(i) + " has no self-loop edge");
    std::sort(in.neighbors[i].begin(), in.neighbors[i].end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  }
  return in;
}

namespace {

Tensor glorot(Rng& rng, std::size_t rows, std::size_t cols) {
  Tensor t({rows, cols});
  const double scale = std::sqrt(2.0 / static_cast<double>(rows + cols));
  for (double& x : t.data) x = scale * rng.gaussian();
  return t;
}

}  // namespace

Model::Model(ModelConfig config, std::uint64_t init_seed) : config_(std::move(config)) {
  if (config_.ecc_layers == 0) throw std::invalid_argument("need at least one ECC layer");
  if (config_.action_classes < 2)
    throw std::invalid_argument("action vocabulary needs at least one action plus EOS");
  Rng rng(seed_for(init_seed, "model-init"));

  for (std::size_t l = 0; l < config_.ecc_layers; ++l) {
    const std::size_t in_dim = l == 0 ? config_.node_dim : config_.ecc_hidden;
    const std::size_t out_dim = config_.ecc_hidden;
    const std::string prefix = "ecc" + std::to_string(l + 1);
    EccLayer layer;
    layer.in_dim = in_dim;
    layer.out_dim = out_dim;
    layer.filter_weight =
        &params_.create(prefix + ".filter.weight", glorot(rng, out_dim * in_dim, config_.edge_dim));
    layer.filter_bias = &params_.create(prefix + ".filter.bias", Tensor({out_dim * in_dim}));
    layer.bias = &params_.create(prefix + ".bias", Tensor({out_dim}));
    ecc_.push_back(layer);
  }

  mlp_w1_ = &params_.create("activity.w1", glorot(rng, config_.mlp_hidden, config_.readout_dim()));
  mlp_b1_ = &params_.create("activity.b1", Tensor({config_.mlp_hidden}));
  mlp_w2_ = &params_.create("activity.w2",
                            glorot(rng, config_.activity_classes, config_.mlp_hidden));
  mlp_b2_ = &params_.create("activity.b2", Tensor({config_.activity_classes}));

  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    const std::size_t input_dim = l == 0 ? config_.decoder_input_dim() : config_.lstm_hidden;
    const std::string prefix = "decoder.lstm" + std::to_string(l + 1);
    LstmLayer layer;
    layer.input_dim = input_dim;
    layer.hidden_dim = config_.lstm_hidden;
    layer.wx = &params_.create(prefix + ".wx", glorot(rng, 4 * config_.lstm_hidden, input_dim));
    layer.wh = &params_.create(prefix + ".wh",
                               glorot(rng, 4 * config_.lstm_hidden, config_.lstm_hidden));
    Tensor b({4 * config_.lstm_hidden});
    for (std::size_t i = config_.lstm_hidden; i < 2 * config_.lstm_hidden; ++i)
      b.data[i] = 1.0;  // forget-gate bias
    layer.b = &params_.create(prefix + ".b", std::move(b));
    lstm_.push_back(layer);
  }
  out_w_ = &params_.create("decoder.out.weight",
                           glorot(rng, config_.action_classes, config_.lstm_hidden));
  out_b_ = &params_.create("decoder.out.bias", Tensor({config_.action_classes}));
}

std::vector<Var> Model::ecc_forward(Tape& tape, const GraphInput& graph,
                                    const std::vector<Var>& node_feats,
                                    std::size_t layer_idx) const {
  const EccLayer& layer = ecc_.at(layer_idx);
  if (graph.node_count() == 0) throw std::invalid_argument("ecc_forward: empty graph");
  if (node_feats.size() != graph.node_count())
    throw std::invalid_argument("ecc_forward: feature count mismatch");

  const Var fw = tape.leaf(*layer.filter_weight);
  const Var fb = tape.leaf(*layer.filter_bias);
  const Var bias = tape.leaf(*layer.bias);

  std::vector<Var> out;
  out.reserve(graph.node_count());
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const auto& nbrs = graph.neighbors[i];
    if (nbrs.empty()) throw std::invalid_argument("ecc_forward: node without self-loop");
    std::vector<Var> messages;
    messages.reserve(nbrs.size());
    for (const auto& [j, attr] : nbrs) {
      if (attr.size() != config_.edge_dim)
        throw std::invalid_argument("edge attribute dimension " + attr.shape_str() +
                                    " does not match configured edge_dim " +
                                    std::to_string(config_.edge_dim));
      const Var e = tape.constant(attr);
      const Var theta_flat = tape.add(tape.matmul(fw, e), fb);
      const Var theta = tape.reshape(theta_flat, {layer.out_dim, layer.in_dim});
      messages.push_back(tape.matmul(theta, node_feats[j]));
    }
    const Var avg = tape.scale(tape.add_n(messages), 1.0 / static_cast<double>(messages.size()));
    out.push_back(tape.add(avg, bias));
  }
  return out;
}

std::vector<std::vector<Var>> Model::ecc_stack(Tape& tape, const GraphInput& graph) const {
  std::vector<Var> feats;
  feats.reserve(graph.node_count());
  for (const Tensor& f : graph.node_features) {
    if (f.size() != config_.node_dim)
      throw std::invalid_argument("node feature dimension " + f.shape_str() +
                                  " does not match configured node_dim " +
                                  std::to_string(config_.node_dim));
    feats.push_back(tape.constant(f));
  }
  std::vector<std::vector<Var>> per_layer;
  for (std::size_t l = 0; l < config_.ecc_layers; ++l) {
    if (l > 0) {
      for (Var& v : feats) v = tape.relu(v);
    }
    feats = ecc_forward(tape, graph, feats, l);
    per_layer.push_back(feats);
  }
  return per_layer;
}

Var Model::readout(Tape& tape, const std::vector<std::vector<Var>>& per_layer_feats) const {
  if (per_layer_feats.size() != config_.ecc_layers)
    throw std::invalid_argument("readout expects one feature set per ECC layer");
  std::vector<Var> pooled;
  pooled.reserve(per_layer_feats.size());
  for (const auto& feats : per_layer_feats) {
    if (feats.empty()) throw std::invalid_argument("readout: empty graph");
    pooled.push_back(tape.mean(std::span<const Var>(feats.data(), feats.size())));
  }
  return tape.concat(std::span<const Var>(pooled.data(), pooled.size()));
}

Var Model::activity_head(Tape& tape, Var v_g) const {
  const Var h = tape.relu(
      tape.add(tape.matmul(tape.leaf(*mlp_w1_), v_g), tape.leaf(*mlp_b1_)));
  return tape.add(tape.matmul(tape.leaf(*mlp_w2_), h), tape.leaf(*mlp_b2_));
}

std::pair<Var, Var> Model::lstm_cell(Tape& tape, const LstmLayer& layer, Var x, Var h,
                                     Var c) const {
  const std::size_t H = layer.hidden_dim;
  const Var pre = tape.add(tape.add(tape.matmul(tape.leaf(*layer.wx), x),
                                    tape.matmul(tape.leaf(*layer.wh), h)),
                           tape.leaf(*layer.b));
  const Var i = tape.sigmoid(tape.slice(pre, 0, H));
  const Var f = tape.sigmoid(tape.slice(pre, H, H));
  const Var g = tape.tanh(tape.slice(pre, 2 * H, H));
  const Var o = tape.sigmoid(tape.slice(pre, 3 * H, H));
  const Var c_next = tape.add(tape.mul(f, c), tape.mul(i, g));
  const Var h_next = tape.mul(o, tape.tanh(c_next));
  return {h_next, c_next};
}

Var Model::decoder_step_input(Tape& tape, Var v_g, Var condition,
                              std::optional<Var> prev_token) const {
  if (!config_.autoregressive) return tape.concat({v_g, condition});
  Var prev = prev_token ? *prev_token
                        : tape.constant(Tensor({config_.action_classes}));
  return tape.concat({v_g, condition, prev});
}

std::vector<Var> Model::decode_teacher_forced(Tape& tape, Var v_g, const Tensor& condition,
                                              const std::vector<std::size_t>& gold_actions)
    const {
  if (condition.size() != config_.activity_classes)
    throw std::invalid_argument("condition vector must have M1 entries");
  const Var cond = tape.constant(condition);
  std::vector<Var> h(config_.lstm_layers), c(config_.lstm_layers);
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    h[l] = tape.constant(Tensor({config_.lstm_hidden}));
    c[l] = tape.constant(Tensor({config_.lstm_hidden}));
  }
  std::vector<Var> step_logits;
  std::optional<Var> prev;
  for (std::size_t step = 0; step <= gold_actions.size(); ++step) {
    Var x = decoder_step_input(tape, v_g, cond, prev);
    for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
      auto [hn, cn] = lstm_cell(tape, lstm_[l], x, h[l], c[l]);
      h[l] = hn;
      c[l] = cn;
      x = hn;
    }
    step_logits.push_back(
        tape.add(tape.matmul(tape.leaf(*out_w_), x), tape.leaf(*out_b_)));
    if (config_.autoregressive && step < gold_actions.size())
      prev = tape.constant(onehot(gold_actions[step], config_.action_classes));
  }
  return step_logits;
}

std::vector<std::size_t> Model::decode_greedy(Tape& tape, Var v_g, const Tensor& condition,
                                              std::size_t max_len) const {
  const Var cond = tape.constant(condition);
  std::vector<Var> h(config_.lstm_layers), c(config_.lstm_layers);
  for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
    h[l] = tape.constant(Tensor({config_.lstm_hidden}));
    c[l] = tape.constant(Tensor({config_.lstm_hidden}));
  }
  std::vector<std::size_t> tokens;
  std::optional<Var> prev;
  for (std::size_t step = 0; step < max_len + 1; ++step) {
    Var x = decoder_step_input(tape, v_g, cond, prev);
    for (std::size_t l = 0; l < config_.lstm_layers; ++l) {
      auto [hn, cn] = lstm_cell(tape, lstm_[l], x, h[l], c[l]);
      h[l] = hn;
      c[l] = cn;
      x = hn;
    }
    const Var logits = tape.add(tape.matmul(tape.leaf(*out_w_), x), tape.leaf(*out_b_));
    const Tensor& lv = tape.value(logits);
    std::size_t best = 0;
    for (std::size_t k = 1; k < lv.size(); ++k)
      if (lv.data[k] > lv.data[best]) best = k;
    if (best == config_.eos_token()) break;
    tokens.push_back(best);
    if (tokens.size() >= max_len) break;
    if (config_.autoregressive) prev = tape.constant(onehot(best, config_.action_classes));
  }
  return tokens;
}

Var Model::joint_loss(Tape& tape, Var activity_logits, std::size_t gold_activity,
                      const std::vector<Var>& step_logits,
                      const std::vector<std::size_t>& gold_actions) const {
  if (step_logits.size() != gold_actions.size() + 1)
    throw std::invalid_argument("expected one step per gold action plus the EOS step");
  Var loss = tape.softmax_cross_entropy(activity_logits, gold_activity);
  for (std::size_t j = 0; j < step_logits.size(); ++j) {
    const std::size_t target =
        j < gold_actions.size() ? gold_actions[j] : config_.eos_token();
    loss = tape.add(loss, tape.softmax_cross_entropy(step_logits[j], target));
  }
  return loss;
}

Var Model::sample_loss(Tape& tape, const GraphInput& graph, std::size_t gold_activity,
                       const std::vector<std::size_t>& gold_actions, LossMode loss_mode,
                       ConditionMode condition_mode, double* activity_component) const {
  const auto per_layer = ecc_stack(tape, graph);
  const Var v_g = readout(tape, per_layer);
  const Var activity_logits = activity_head(tape, v_g);

  Tensor condition({config_.activity_classes});
  switch (condition_mode) {
    case ConditionMode::gold_activity:
      condition = onehot(gold_activity, config_.activity_classes);
      break;
    case ConditionMode::predicted_activity: {
      const Tensor& lv = tape.value(activity_logits);
      std::size_t best = 0;
      for (std::size_t k = 1; k < lv.size(); ++k)
        if (lv.data[k] > lv.data[best]) best = k;
      condition = onehot(best, config_.activity_classes);
      break;
    }
    case ConditionMode::none:
      break;  // zeros
  }
  const auto step_logits = decode_teacher_forced(tape, v_g, condition, gold_actions);

  auto action_sum = [&]() {
    Var loss = tape.softmax_cross_entropy(
        step_logits[0], gold_actions.empty() ? config_.eos_token() : gold_actions[0]);
    for (std::size_t j = 1; j < step_logits.size(); ++j) {
      const std::size_t target =
          j < gold_actions.size() ? gold_actions[j] : config_.eos_token();
      loss = tape.add(loss, tape.softmax_cross_entropy(step_logits[j], target));
    }
    return loss;
  };

  if (loss_mode == LossMode::action_only) {
    if (activity_component) *activity_component = 0.0;
    return action_sum();
  }
  const Var act_ce = tape.softmax_cross_entropy(activity_logits, gold_activity);
  if (activity_component) *activity_component = tape.value(act_ce)[0];
  return tape.add(act_ce, action_sum());
}

Prediction Model::predict(const GraphInput& graph, ConditionMode condition_mode) const {
  Tape tape;
  const auto per_layer = ecc_stack(tape, graph);
  const Var v_g = readout(tape, per_layer);
  const Var activity_logits = activity_head(tape, v_g);
  const Tensor& lv = tape.value(activity_logits);
  Prediction pred;
  for (std::size_t k = 1; k < lv.size(); ++k)
    if (lv.data[k] > lv.data[pred.activity]) pred.activity = k;

  Tensor condition({config_.activity_classes});
  if (condition_mode == ConditionMode::predicted_activity)
    condition = onehot(pred.activity, config_.activity_classes);
  else if (condition_mode == ConditionMode::gold_activity)
    throw std::invalid_argument("predict cannot use gold conditioning");
  pred.actions = decode_greedy(tape, v_g, condition, config_.max_decode_len);
  return pred;
}

Tensor Model::onehot(std::size_t index, std::size_t classes) const {
  Tensor t({classes});
  if (index >= classes) throw std::out_of_range("onehot index out of range");
  t.data[index] = 1.0;
  return t;
}

std::vector<TrainLogRow> train_model(Model& model, const std::vector<TrainSample>& samples,
                                     const TrainOptions& options) {
  if (samples.empty()) throw std::invalid_argument("train_model: empty training set");
  AdamState adam(model.params(), options.learning_rate);
  std::vector<TrainLogRow> log;
  log.reserve(options.epochs);
  const double inv_n = 1.0 / static_cast<double>(samples.size());

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    model.params().zero_grads();
    double total = 0.0, act_total = 0.0;
    for (const TrainSample& s : samples) {
      Tape tape;
      double act_part = 0.0;
      const Var loss = model.sample_loss(tape, s.graph, s.activity, s.gold_actions,
                                         options.loss_mode, options.condition_mode, &act_part);
      total += tape.value(loss)[0];
      act_total += act_part;
      tape.backward(loss);
    }
    for (Param& p : model.params())
      for (double& g : p.grad.data) g *= inv_n;

    const double mean_total = total * inv_n;
    const double mean_act = act_total * inv_n;
    const double mean_action = mean_total - mean_act;
    if (!std::isfinite(mean_total))
      throw std::runtime_error("training diverged (non-finite loss) at epoch " +
                               std::to_string(epoch));
    adam_step(adam, model.params());
    log.push_back({epoch, mean_total, mean_act, mean_action});
    if (options.on_epoch) options.on_epoch(epoch, mean_total, mean_act, mean_action);
  }
  return log;
}

Checkpoint model_checkpoint(const Model& model,
                            std::vector<std::pair<std::string, std::string>> extra_meta) {
  const ModelConfig& c = model.config();
  std::vector<std::pair<std::string, std::string>> meta = {
      {"node_dim", std::to_string(c.node_dim)},
      {"edge_dim", std::to_string(c.edge_dim)},
      {"ecc_layers", std::to_string(c.ecc_layers)},
      {"ecc_hidden", std::to_string(c.ecc_hidden)},
      {"mlp_hidden", std::to_string(c.mlp_hidden)},
      {"lstm_hidden", std::to_string(c.lstm_hidden)},
      {"lstm_layers", std::to_string(c.lstm_layers)},
      {"activity_classes", std::to_string(c.activity_classes)},
      {"action_classes", std::to_string(c.action_classes)},
      {"max_decode_len", std::to_string(c.max_decode_len)},
      {"autoregressive", c.autoregressive ? "1" : "0"},
  };
  meta.insert(meta.end(), extra_meta.begin(), extra_meta.end());
  return snapshot(model.params(), std::move(meta));
}

ModelConfig config_from_checkpoint(const Checkpoint& ck) {
  ModelConfig c;
  auto need = [&](const char* key) {
    const std::string* v = ck.find_meta(key);
    if (!v) throw std::runtime_error(std::string("checkpoint misses meta key: ") + key);
    return *v;
  };
  c.node_dim = std::stoul(need("node_dim"));
  c.edge_dim = std::stoul(need("edge_dim"));
  c.ecc_layers = std::stoul(need("ecc_layers"));
  c.ecc_hidden = std::stoul(need("ecc_hidden"));
  c.mlp_hidden = std::stoul(need("mlp_hidden"));
  c.lstm_hidden = std::stoul(need("lstm_hidden"));
  c.lstm_layers = std::stoul(need("lstm_layers"));
  c.activity_classes = std::stoul(need("activity_classes"));
  c.action_classes = std::stoul(need("action_classes"));
  c.max_decode_len = std::stoul(need("max_decode_len"));
  c.autoregressive = need("autoregressive") == "1";
  return c;
}

}  // namespace gazegraph
