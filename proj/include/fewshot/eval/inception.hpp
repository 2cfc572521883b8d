#pragma once

#include <cstdint>
#include <vector>

#include "fewshot/core/tensor.hpp"
#include "fewshot/nn/layers.hpp"

namespace fewshot::eval {

/// Image classifier contract for the diversity score: a probability vector
/// per image (nonnegative, summing to 1).
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::vector<double> probabilities(const Tensor& image) const = 0;
};

/// Hermetic classifier: a fixed-seed conv - ReLU - pool - linear - softmax
/// stack. Deterministic stand-in for a pretrained classifier.
class SmallConvClassifier : public Classifier {
 public:
  SmallConvClassifier(std::uint64_t seed, int n_classes, int channels = 8, int in_channels = 3);
  std::vector<double> probabilities(const Tensor& image) const override;
  int n_classes() const { return n_classes_; }

 private:
  int n_classes_;
  nn::Conv2d conv_;
  nn::Linear fc_;
};

/// Diversity score over per-image class distributions: splits the list into
/// n_splits contiguous chunks, takes exp of the mean KL divergence between
/// each distribution and its chunk's marginal, and averages the chunks. The
/// result is always >= 1; it equals 1 iff every distribution matches its
/// chunk marginal.
double inception_score(const std::vector<Tensor>& images, const Classifier& classifier,
                       int n_splits = 1);

/// Same computation on precomputed distributions.
double inception_score_from_probs(const std::vector<std::vector<double>>& probs, int n_splits = 1);

}  // namespace fewshot::eval
