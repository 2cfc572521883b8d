#pragma once

#include <vector>

#include "fewshot/core/tensor.hpp"

namespace fewshot::model {

/// Anything that turns a content image plus a set of style images into a
/// translated image. Implemented by the generator and by test doubles.
class Translator {
 public:
  virtual ~Translator() = default;
  virtual Tensor translate(const Tensor& content, const std::vector<Tensor>& styles) const = 0;
};

/// Per-class realness scoring plus penultimate-layer features.
class Critic {
 public:
  virtual ~Critic() = default;

  /// Unbounded realness logits, one per class.
  virtual Tensor discriminate(const Tensor& x) const = 0;

  /// Class-independent feature vector from below the prediction layer.
  virtual Tensor extract_features(const Tensor& x) const = 0;

  /// The single head selected for a translation; equals discriminate(x)[c].
  double realness(const Tensor& x, int class_index) const;
};

}  // namespace fewshot::model
