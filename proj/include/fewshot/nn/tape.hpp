#pragma once

#include <vector>

#include "fewshot/core/tensor.hpp"

namespace fewshot::nn {

/// Activation record for one forward pass. Layers push what their backward
/// needs in forward order and pop it in reverse, so a composite's backward
/// simply walks its children backwards. Copy the tape to run several
/// backward passes over one forward.
class Tape {
 public:
  void push(Tensor t) { slots_.push_back(std::move(t)); }

  Tensor pop() {
    Tensor t = std::move(slots_.back());
    slots_.pop_back();
    return t;
  }

  bool empty() const { return slots_.empty(); }
  std::size_t size() const { return slots_.size(); }

 private:
  std::vector<Tensor> slots_;
};

}  // namespace fewshot::nn
