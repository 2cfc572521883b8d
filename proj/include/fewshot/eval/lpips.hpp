#pragma once

#include <cstdint>
#include <vector>

#include "fewshot/core/tensor.hpp"
#include "fewshot/nn/layers.hpp"

namespace fewshot::eval {

/// Feature stack for perceptual distance: per-layer feature maps plus one
/// nonnegative weight per channel of each layer.
class LpipsBackbone {
 public:
  virtual ~LpipsBackbone() = default;
  virtual std::vector<Tensor> features(const Tensor& image) const = 0;
  virtual const std::vector<Tensor>& layer_weights() const = 0;
};

/// Hermetic backbone: a fixed-seed random convolution stack (3x3 kernels,
/// ReLU after each layer) with seeded uniform channel weights. Deterministic
/// and dependency-free, so metric results are reproducible anywhere; swap in
/// a pretrained adapter for perceptual studies.
class RandomConvBackbone : public LpipsBackbone {
 public:
  RandomConvBackbone(std::uint64_t seed, std::vector<int> widths = {8, 16}, int stride = 2,
                     int in_channels = 3);

  std::vector<Tensor> features(const Tensor& image) const override;
  const std::vector<Tensor>& layer_weights() const override;

  const std::vector<nn::Conv2d>& convs() const { return convs_; }

 private:
  std::vector<nn::Conv2d> convs_;
  std::vector<Tensor> weights_;
};

/// Perceptual distance: per layer, unit-normalize each spatial position's
/// channel vector, take the channel-weighted squared difference, average
/// over space, and sum over layers. Symmetric, nonnegative, and exactly 0
/// for identical inputs.
double lpips(const Tensor& a, const Tensor& b, const LpipsBackbone& backbone);

}  // namespace fewshot::eval
