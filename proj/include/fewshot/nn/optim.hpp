#pragma once

#include <map>
#include <string>
#include <vector>

#include "fewshot/nn/layers.hpp"

namespace fewshot::nn {

/// RMSProp: v <- decay*v + (1-decay)*g^2; p <- p - lr * g / (sqrt(v) + eps).
/// Accumulator tensors are keyed by parameter name so they can be
/// checkpointed and restored exactly.
class RmsProp {
 public:
  RmsProp(double learning_rate, double decay = 0.99, double eps = 1e-8)
      : learning_rate_(learning_rate), decay_(decay), eps_(eps) {}

  void step(const std::vector<Param*>& params);

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr) { learning_rate_ = lr; }

  const std::map<std::string, Tensor>& state() const { return state_; }
  void restore_state(std::map<std::string, Tensor> state) { state_ = std::move(state); }
  void drop_state(const std::string& name) { state_.erase(name); }

 private:
  double learning_rate_;
  double decay_;
  double eps_;
  std::map<std::string, Tensor> state_;
};

void zero_grads(const std::vector<Param*>& params);

}  // namespace fewshot::nn
