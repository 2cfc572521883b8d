#include "fewshot/model/interfaces.hpp"

#include <stdexcept>

namespace fewshot::model {

double Critic::realness(const Tensor& x, int class_index) const {
  const Tensor logits = discriminate(x);
  if (class_index < 0 || class_index >= logits.dim(0)) {
    throw std::out_of_range("realness: class index " + std::to_string(class_index) +
                            " out of range for " + std::to_string(logits.dim(0)) + " classes");
  }
  return logits[class_index];
}

}  // namespace fewshot::model
