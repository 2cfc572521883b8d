#pragma once

#include <cstdint>
#include <vector>

#include "fewshot/model/config.hpp"
#include "fewshot/model/interfaces.hpp"
#include "fewshot/nn/layers.hpp"

namespace fewshot::model {

/// Class-conditional discriminator: one shared convolutional trunk and a
/// 1x1 prediction head with a channel per class, spatially averaged into
/// per-class realness logits. Features are the trunk output pooled over
/// space, so they do not depend on the prediction head.
class Discriminator : public Critic {
 public:
  Discriminator(const DiscriminatorConfig& config, std::uint64_t seed);

  const DiscriminatorConfig& config() const { return config_; }
  int feature_dim() const { return config_.feature_dim(); }

  struct Output {
    Tensor logits;    // (n_classes)
    Tensor features;  // (feature_dim)
  };
  Output forward(const Tensor& x, nn::Tape* tape = nullptr) const;

  Tensor discriminate(const Tensor& x) const override;
  Tensor extract_features(const Tensor& x) const override;

  /// Backward from logit and feature gradients to the input gradient,
  /// accumulating parameter gradients. Either gradient may be empty.
  Tensor backward(const Tensor& dlogits, const Tensor& dfeatures, nn::Tape& tape);

  std::vector<nn::Param*> params();
  nn::Param& head_weight() { return head_.weight(); }
  nn::Param& head_bias() { return head_.bias(); }

  /// Replaces the prediction head for a new class count (fine-tuning onto a
  /// manifest with different classes); trunk parameters are kept.
  void reinitialize_head(int n_classes, std::uint64_t seed);

 private:
  DiscriminatorConfig config_;
  nn::Sequential trunk_;
  nn::Conv2d head_;
};

}  // namespace fewshot::model
