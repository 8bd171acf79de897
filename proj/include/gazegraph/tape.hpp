#ifndef GAZEGRAPH_TAPE_HPP
#define GAZEGRAPH_TAPE_HPP

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gazegraph/tensor.hpp"

namespace gazegraph {

/// Trainable tensor with an accumulated gradient of the same shape.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor(value.shape);
  }

  void zero_grad() { grad.fill(0.0); }
};

/// Owns parameters in registration order; order is the iteration order for
/// the optimizer and the checkpoint writer, so it is deterministic.
class ParamStore {
 public:
  Param& create(const std::string& name, Tensor init) {
    if (index_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
    params_.emplace_back(name, std::move(init));
    index_[name] = params_.size() - 1;
    return params_.back();
  }

  bool contains(const std::string& name) const { return index_.count(name) > 0; }

  Param& at(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
    return params_[it->second];
  }

  std::size_t count() const { return params_.size(); }

  std::size_t total_size() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  void zero_grads() {
    for (auto& p : params_) p.zero_grad();
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::deque<Param> params_;  // deque: stable addresses across create()
  std::map<std::string, std::size_t> index_;
};

/// Handle to a value on a Tape.
struct Var {
  std::int32_t id = -1;
  bool valid() const { return id >= 0; }
};

/// Single-threaded reverse-mode differentiation tape. Values are computed
/// eagerly; each op records a backward closure. backward(loss) accumulates
/// d loss / d param into every reachable Param's grad field.
class Tape {
 public:
  Var constant(Tensor v) { return push(std::move(v), {}, nullptr, false); }

  /// Leaf bound to a Param: backward() adds into p.grad.
  Var leaf(Param& p) {
    Var v = push(p.value, {}, nullptr, true);
    leaves_.emplace_back(v.id, &p);
    return v;
  }

  const Tensor& value(Var v) const { return nodes_[check(v)].value; }

  /// Gradient of the last backward() call w.r.t. an arbitrary tape node.
  const Tensor& grad(Var v) const { return nodes_[check(v)].grad; }

  std::size_t node_count() const { return nodes_.size(); }

  /// True if any l2norm saw a zero vector since the last clear().
  bool zero_norm_seen() const { return zero_norm_seen_; }

  void clear() {
    nodes_.clear();
    leaves_.clear();
    zero_norm_seen_ = false;
  }

  // ---- ops ------------------------------------------------------------

  Var matmul(Var a, Var b) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (A.rank() != 2 || (B.rank() != 2 && B.rank() != 1))
      throw std::invalid_argument("matmul: need [m x k] and [k x n] (or [k]), got " +
                                  A.shape_str() + " and " + B.shape_str());
    const std::size_t m = A.rows(), k = A.cols();
    const bool vec = B.rank() == 1;
    const std::size_t kb = vec ? B.shape[0] : B.rows();
    const std::size_t n = vec ? 1 : B.cols();
    if (k != kb)
      throw std::invalid_argument("matmul: inner dimensions disagree: " + A.shape_str() +
                                  " vs " + B.shape_str());
    Tensor C(vec ? std::vector<std::size_t>{m} : std::vector<std::size_t>{m, n});
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t t = 0; t < k; ++t) s += A.data[i * k + t] * B.data[t * n + j];
        C.data[i * n + j] = s;
      }
    return push(std::move(C), {a, b}, [m, k, n](Tape& t, Node& nd) {
      const Tensor& A = t.nodes_[nd.in[0]].value;
      const Tensor& B = t.nodes_[nd.in[1]].value;
      Tensor& dA = t.grad_buf(nd.in[0]);
      Tensor& dB = t.grad_buf(nd.in[1]);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t t2 = 0; t2 < k; ++t2) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += nd.grad.data[i * n + j] * B.data[t2 * n + j];
          dA.data[i * k + t2] += s;
        }
      for (std::size_t t2 = 0; t2 < k; ++t2)
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += A.data[i * k + t2] * nd.grad.data[i * n + j];
          dB.data[t2 * n + j] += s;
        }
    });
  }

  Var add(Var a, Var b) { return binary(a, b, "add", [](double x, double y) { return x + y; },
                                        [](double, double) { return 1.0; },
                                        [](double, double) { return 1.0; }); }

  Var sub(Var a, Var b) { return binary(a, b, "sub", [](double x, double y) { return x - y; },
                                        [](double, double) { return 1.0; },
                                        [](double, double) { return -1.0; }); }

  Var mul(Var a, Var b) { return binary(a, b, "mul", [](double x, double y) { return x * y; },
                                        [](double, double y) { return y; },
                                        [](double x, double) { return x; }); }

  Var scale(Var a, double c) {
    Tensor out = value(a);
    for (double& x : out.data) x *= c;
    return push(std::move(out), {a}, [c](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i) dA.data[i] += c * nd.grad.data[i];
    });
  }

  Var relu(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = x > 0.0 ? x : 0.0;
    return push(std::move(out), {a}, [](Tape& t, Node& nd) {
      const Tensor& A = t.nodes_[nd.in[0]].value;
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i)
        if (A.data[i] > 0.0) dA.data[i] += nd.grad.data[i];
    });
  }

  Var tanh(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = std::tanh(x);
    return push(std::move(out), {a}, [](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i)
        dA.data[i] += nd.grad.data[i] * (1.0 - nd.value.data[i] * nd.value.data[i]);
    });
  }

  Var sigmoid(Var a) {
    Tensor out = value(a);
    for (double& x : out.data) x = 1.0 / (1.0 + std::exp(-x));
    return push(std::move(out), {a}, [](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i) {
        const double s = nd.value.data[i];
        dA.data[i] += nd.grad.data[i] * s * (1.0 - s);
      }
    });
  }

  /// Concatenation of rank-1 tensors.
  Var concat(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("concat: no inputs");
    std::size_t total = 0;
    for (Var p : parts) {
      if (value(p).rank() != 1) throw std::invalid_argument("concat: rank-1 inputs only");
      total += value(p).size();
    }
    Tensor out({total});
    std::size_t off = 0;
    for (Var p : parts) {
      const Tensor& t = value(p);
      std::copy(t.data.begin(), t.data.end(), out.data.begin() + off);
      off += t.size();
    }
    return push(std::move(out), {parts.begin(), parts.end()}, [](Tape& t, Node& nd) {
      std::size_t off2 = 0;
      for (std::int32_t in : nd.in) {
        Tensor& dI = t.grad_buf(in);
        for (std::size_t i = 0; i < dI.size(); ++i) dI.data[i] += nd.grad.data[off2 + i];
        off2 += dI.size();
      }
    });
  }

  Var concat(std::initializer_list<Var> parts) {
    return concat(std::span<const Var>(parts.begin(), parts.size()));
  }

  Var slice(Var a, std::size_t start, std::size_t len) {
    const Tensor& A = value(a);
    if (A.rank() != 1 || start + len > A.size())
      throw std::invalid_argument("slice: out of range for " + A.shape_str());
    Tensor out({len});
    std::copy(A.data.begin() + start, A.data.begin() + start + len, out.data.begin());
    return push(std::move(out), {a}, [start](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i) dA.data[start + i] += nd.grad.data[i];
    });
  }

  Var reshape(Var a, std::vector<std::size_t> shape) {
    Tensor out = value(a);
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    if (n != out.size())
      throw std::invalid_argument("reshape: size mismatch for " + out.shape_str());
    out.shape = std::move(shape);
    return push(std::move(out), {a}, [](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i) dA.data[i] += nd.grad.data[i];
    });
  }

  /// Elementwise sum over same-shaped tensors.
  Var add_n(std::span<const Var> parts) {
    if (parts.empty()) throw std::invalid_argument("add_n: no inputs");
    Tensor out = value(parts[0]);
    for (std::size_t p = 1; p < parts.size(); ++p) {
      const Tensor& t = value(parts[p]);
      if (!t.same_shape(out))
        throw std::invalid_argument("add_n: shape mismatch " + out.shape_str() + " vs " +
                                    t.shape_str());
      for (std::size_t i = 0; i < out.size(); ++i) out.data[i] += t.data[i];
    }
    return push(std::move(out), {parts.begin(), parts.end()}, [](Tape& t, Node& nd) {
      for (std::int32_t in : nd.in) {
        Tensor& dI = t.grad_buf(in);
        for (std::size_t i = 0; i < dI.size(); ++i) dI.data[i] += nd.grad.data[i];
      }
    });
  }

  /// Elementwise mean over same-shaped tensors.
  Var mean(std::span<const Var> parts) {
    Var s = add_n(parts);
    return scale(s, 1.0 / static_cast<double>(parts.size()));
  }

  Var mean(std::initializer_list<Var> parts) {
    return mean(std::span<const Var>(parts.begin(), parts.size()));
  }

  Var sum(Var a) {
    double s = 0.0;
    for (double x : value(a).data) s += x;
    return push(Tensor::scalar(s), {a}, [](Tape& t, Node& nd) {
      Tensor& dA = t.grad_buf(nd.in[0]);
      for (double& g : dA.data) g += nd.grad.data[0];
    });
  }

  /// Normalizes to unit Euclidean norm. The zero vector maps to itself and
  /// raises the tape's zero-norm flag (degenerate crops can produce it).
  Var l2norm(Var a) {
    const Tensor& A = value(a);
    const double n = A.norm();
    if (n == 0.0) {
      zero_norm_seen_ = true;
      Tensor out = A;
      return push(std::move(out), {a}, [](Tape&, Node&) {});
    }
    Tensor out = A;
    for (double& x : out.data) x /= n;
    return push(std::move(out), {a}, [n](Tape& t, Node& nd) {
      const Tensor& A2 = t.nodes_[nd.in[0]].value;
      Tensor& dA = t.grad_buf(nd.in[0]);
      double vg = 0.0;
      for (std::size_t i = 0; i < A2.size(); ++i) vg += A2.data[i] * nd.grad.data[i];
      const double n3 = n * n * n;
      for (std::size_t i = 0; i < A2.size(); ++i)
        dA.data[i] += nd.grad.data[i] / n - A2.data[i] * vg / n3;
    });
  }

  /// -log softmax(logits)[target]; gradient is softmax - onehot.
  Var softmax_cross_entropy(Var logits, std::size_t target) {
    const Tensor& L = value(logits);
    if (L.rank() != 1) throw std::invalid_argument("softmax_cross_entropy: rank-1 logits");
    if (target >= L.size())
      throw std::out_of_range("softmax_cross_entropy: class " + std::to_string(target) +
                              " out of range [0," + std::to_string(L.size()) + ")");
    double mx = L.data[0];
    for (double x : L.data) mx = std::max(mx, x);
    double Z = 0.0;
    for (double x : L.data) Z += std::exp(x - mx);
    const double logZ = mx + std::log(Z);
    const double loss = logZ - L.data[target];
    return push(Tensor::scalar(loss), {logits}, [target, mx, Z](Tape& t, Node& nd) {
      const Tensor& L2 = t.nodes_[nd.in[0]].value;
      Tensor& dL = t.grad_buf(nd.in[0]);
      const double g = nd.grad.data[0];
      for (std::size_t i = 0; i < L2.size(); ++i) {
        double p = std::exp(L2.data[i] - mx) / Z;
        if (i == target) p -= 1.0;
        dL.data[i] += g * p;
      }
    });
  }

  // ---- reverse sweep ---------------------------------------------------

  /// Accumulates d loss / d p into every reachable Param. Node-level grads
  /// are reset at the start of each call, so calling twice doubles the
  /// parameter gradients (accumulation contract).
  void backward(Var loss) {
    Node& ln = nodes_[check(loss)];
    if (ln.value.size() != 1)
      throw std::invalid_argument("backward: loss must be scalar, got " + ln.value.shape_str());
    for (Node& nd : nodes_) nd.grad = Tensor();  // lazily re-allocated
    ln.grad = Tensor::scalar(1.0);
    for (std::int32_t id = loss.id; id >= 0; --id) {
      Node& nd = nodes_[static_cast<std::size_t>(id)];
      if (nd.grad.size() == 0 || !nd.backward) continue;
      nd.backward(*this, nd);
    }
    for (auto& [id, p] : leaves_) {
      const Tensor& g = nodes_[static_cast<std::size_t>(id)].grad;
      if (g.size() == 0) continue;
      for (std::size_t i = 0; i < g.size(); ++i) p->grad.data[i] += g.data[i];
    }
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::vector<std::int32_t> in;
    std::function<void(Tape&, Node&)> backward;
    bool needs_grad = false;
  };

  std::size_t check(Var v) const {
    if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size())
      throw std::out_of_range("invalid tape handle");
    return static_cast<std::size_t>(v.id);
  }

  Tensor& grad_buf(std::int32_t id) {
    Node& nd = nodes_[static_cast<std::size_t>(id)];
    if (nd.grad.size() == 0) nd.grad = Tensor(nd.value.shape);
    return nd.grad;
  }

  Var push(Tensor value, std::vector<Var> inputs, std::function<void(Tape&, Node&)> bw,
           bool needs_grad = false) {
    Node nd;
    nd.value = std::move(value);
    nd.in.reserve(inputs.size());
    for (Var v : inputs) {
      nd.in.push_back(static_cast<std::int32_t>(check(v)));
      needs_grad = needs_grad || nodes_[static_cast<std::size_t>(v.id)].needs_grad;
    }
    nd.needs_grad = needs_grad;
    // ops whose every input is constant never propagate, so skip the closure
    nd.backward = needs_grad ? std::move(bw) : nullptr;
    nodes_.push_back(std::move(nd));
    return Var{static_cast<std::int32_t>(nodes_.size() - 1)};
  }

  template <typename F, typename Ga, typename Gb>
  Var binary(Var a, Var b, const char* name, F f, Ga ga, Gb gb) {
    const Tensor& A = value(a);
    const Tensor& B = value(b);
    if (!A.same_shape(B))
      throw std::invalid_argument(std::string(name) + ": shape mismatch " + A.shape_str() +
                                  " vs " + B.shape_str());
    Tensor out(A.shape);
    for (std::size_t i = 0; i < A.size(); ++i) out.data[i] = f(A.data[i], B.data[i]);
    return push(std::move(out), {a, b}, [ga, gb](Tape& t, Node& nd) {
      const Tensor& A2 = t.nodes_[nd.in[0]].value;
      const Tensor& B2 = t.nodes_[nd.in[1]].value;
      Tensor& dA = t.grad_buf(nd.in[0]);
      Tensor& dB = t.grad_buf(nd.in[1]);
      for (std::size_t i = 0; i < nd.grad.size(); ++i) {
        dA.data[i] += nd.grad.data[i] * ga(A2.data[i], B2.data[i]);
        dB.data[i] += nd.grad.data[i] * gb(A2.data[i], B2.data[i]);
      }
    });
  }

  std::vector<Node> nodes_;
  std::vector<std::pair<std::int32_t, Param*>> leaves_;
  bool zero_norm_seen_ = false;
};

}  // namespace gazegraph

#endif  // GAZEGRAPH_TAPE_HPP
