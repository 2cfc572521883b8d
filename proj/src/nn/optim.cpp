#include "fewshot/nn/optim.hpp"

#include <cmath>

namespace fewshot::nn {

void RmsProp::step(const std::vector<Param*>& params) {
  for (Param* p : params) {
    auto [it, inserted] = state_.try_emplace(p->name, Tensor::zeros_like(p->value));
    Tensor& v = it->second;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double g = p->grad[i];
      v[i] = decay_ * v[i] + (1.0 - decay_) * g * g;
      p->value[i] -= learning_rate_ * g / (std::sqrt(v[i]) + eps_);
    }
  }
}

void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->grad.zero();
}

}  // namespace fewshot::nn
