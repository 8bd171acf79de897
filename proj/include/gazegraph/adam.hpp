#ifndef GAZEGRAPH_ADAM_HPP
#define GAZEGRAPH_ADAM_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "gazegraph/tape.hpp"

namespace gazegraph {

/// Adam optimizer state: one pair of moment tensors per parameter, in
/// the store's registration order.
struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t step = 0;
  std::vector<Tensor> first_moment;
  std::vector<Tensor> second_moment;

  explicit AdamState(const ParamStore& params, double lr = 1e-3) : learning_rate(lr) {
    for (const Param& p : params) {
      first_moment.emplace_back(p.value.shape);
      second_moment.emplace_back(p.value.shape);
    }
  }
};

inline void adam_step(AdamState& state, ParamStore& params) {
  std::size_t idx = 0;
  for (Param& p : params) {
    for (double g : p.grad.data)
      if (!std::isfinite(g))
        throw std::runtime_error("adam_step: non-finite gradient in parameter '" + p.name + "'");
    ++idx;
  }
  state.step += 1;
  const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  idx = 0;
  for (Param& p : params) {
    Tensor& m = state.first_moment[idx];
    Tensor& v = state.second_moment[idx];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      m.data[i] = state.beta1 * m.data[i] + (1.0 - state.beta1) * g;
      v.data[i] = state.beta2 * v.data[i] + (1.0 - state.beta2) * g * g;
      const double mhat = m.data[i] / b1t;
      const double vhat = v.data[i] / b2t;
      p.value.data[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
    ++idx;
  }
}

}  // namespace gazegraph

#endif  // GAZEGRAPH_ADAM_HPP
