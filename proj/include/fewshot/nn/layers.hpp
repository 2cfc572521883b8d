#pragma once

#include <memory>
#include <string>
#include <vector>

#include "fewshot/core/rng.hpp"
#include "fewshot/core/tensor.hpp"
#include "fewshot/nn/tape.hpp"

namespace fewshot::nn {

/// A learnable tensor with its gradient accumulator.
struct Param {
  std::string name;
  Tensor value;
  Tensor grad;

  explicit Param(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)) {
    grad = Tensor::zeros_like(value);
  }
};

/// Single-input differentiable layer. forward() with a tape records what
/// backward() needs; with a null tape it runs inference-only. backward()
/// accumulates parameter gradients and returns the input gradient.
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Tensor forward(const Tensor& x, Tape* tape) const = 0;
  virtual Tensor backward(const Tensor& grad_out, Tape& tape) = 0;
  virtual void collect_params(std::vector<Param*>& out) {}
};

class Conv2d : public Layer {
 public:
  /// He-initialized weights (zero-mean Gaussian, fan-in scaled), zero biases.
  Conv2d(std::string name, int in_channels, int out_channels, int kernel, int stride, int padding,
         Rng& rng);

  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
  void collect_params(std::vector<Param*>& out) override;

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }
  const Param& weight() const { return weight_; }
  const Param& bias() const { return bias_; }
  int out_channels() const { return out_channels_; }
  int kernel() const { return kernel_; }

 private:
  int in_channels_, out_channels_, kernel_, stride_, padding_;
  Param weight_;  // (out, in*k*k), row-major GEMM layout
  Param bias_;    // (out)
};

/// Per-channel, per-sample normalization over spatial positions; no affine
/// terms (AdaIN supplies those where needed).
class InstanceNorm : public Layer {
 public:
  explicit InstanceNorm(double eps = 1e-5) : eps_(eps) {}
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;

 private:
  double eps_;
};

class ReLU : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
};

class LeakyReLU : public Layer {
 public:
  explicit LeakyReLU(double slope = 0.2) : slope_(slope) {}
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;

 private:
  double slope_;
};

class Tanh : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
};

/// Nearest-neighbor 2x upsampling.
class Upsample2x : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
};

class Linear : public Layer {
 public:
  Linear(std::string name, int in_features, int out_features, Rng& rng);
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
  void collect_params(std::vector<Param*>& out) override;

  Param& weight() { return weight_; }
  Param& bias() { return bias_; }

 private:
  int in_features_, out_features_;
  Param weight_;  // (out, in)
  Param bias_;    // (out)
};

/// (C,H,W) -> (C) spatial mean.
class GlobalAvgPool : public Layer {
 public:
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
};

class Sequential : public Layer {
 public:
  Sequential() = default;
  void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
  void collect_params(std::vector<Param*>& out) override;
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// conv - norm - relu - conv - norm around an identity skip.
class ResBlock : public Layer {
 public:
  ResBlock(const std::string& name, int channels, Rng& rng);
  Tensor forward(const Tensor& x, Tape* tape) const override;
  Tensor backward(const Tensor& grad_out, Tape& tape) override;
  void collect_params(std::vector<Param*>& out) override;

 private:
  Sequential body_;
};

/// Adaptive instance normalization: per-channel instance statistics, then the
/// caller-supplied affine transform. `scale` and `shift` are vectors of the
/// feature channel count.
Tensor adain(const Tensor& features, const Tensor& scale, const Tensor& shift, double eps = 1e-5);

/// adain with a tape for the backward pass.
Tensor adain_forward(const Tensor& features, const Tensor& scale, const Tensor& shift, Tape* tape,
                     double eps = 1e-5);

/// Backward of adain_forward; returns d(features) and accumulates the affine
/// input gradients into dscale/dshift.
Tensor adain_backward(const Tensor& grad_out, Tape& tape, Tensor& dscale, Tensor& dshift);

}  // namespace fewshot::nn
