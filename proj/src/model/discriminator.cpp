#include "fewshot/model/discriminator.hpp"

#include <stdexcept>

#include "fewshot/core/rng.hpp"

namespace fewshot::model {

using nn::Tape;

namespace {

nn::Sequential build_trunk(const DiscriminatorConfig& cfg, Rng& rng) {
  nn::Sequential trunk;
  int ch = cfg.base_channels;
  trunk.add(std::make_unique<nn::Conv2d>("disc.stem", 3, ch, 3, 1, 1, rng));
  trunk.add(std::make_unique<nn::LeakyReLU>(0.2));
  for (int i = 0; i < cfg.n_layers; ++i) {
    trunk.add(std::make_unique<nn::Conv2d>("disc.down" + std::to_string(i), ch, ch * 2, 4, 2, 1, rng));
    trunk.add(std::make_unique<nn::LeakyReLU>(0.2));
    ch *= 2;
  }
  return trunk;
}

nn::Conv2d build_head(int feature_dim, int n_classes, std::uint64_t seed) {
  Rng rng(mix_seed(seed, fnv1a("discriminator.head")));
  return nn::Conv2d("disc.head", feature_dim, n_classes, 1, 1, 0, rng);
}

}  // namespace

Discriminator::Discriminator(const DiscriminatorConfig& config, std::uint64_t seed)
    : config_(config),
      trunk_([&] {
        config_.validate();
        Rng rng(mix_seed(seed, fnv1a("discriminator")));
        return build_trunk(config_, rng);
      }()),
      head_(build_head(config_.feature_dim(), config_.n_classes, seed)) {}

Discriminator::Output Discriminator::forward(const Tensor& x, Tape* tape) const {
  if (x.ndim() != 3 || x.dim(0) != 3) {
    throw std::invalid_argument("discriminator: expected a (3,H,W) image, got " + x.shape_string());
  }
  if (x.dim(1) < (1 << config_.n_layers) || x.dim(2) < (1 << config_.n_layers)) {
    throw std::invalid_argument("discriminator: image too small for " +
                                std::to_string(config_.n_layers) + " downsampling layers");
  }
  const Tensor trunk_out = trunk_.forward(x, tape);
  const int fdim = trunk_out.dim(0);
  const int hw = trunk_out.dim(1) * trunk_out.dim(2);

  Output out;
  out.features = Tensor({fdim});
  for (int c = 0; c < fdim; ++c) {
    const double* src = trunk_out.data() + static_cast<std::size_t>(c) * hw;
    double sum = 0.0;
    for (int i = 0; i < hw; ++i) sum += src[i];
    out.features[c] = sum / hw;
  }

  const Tensor head_out = head_.forward(trunk_out, tape);
  out.logits = Tensor({config_.n_classes});
  for (int c = 0; c < config_.n_classes; ++c) {
    const double* src = head_out.data() + static_cast<std::size_t>(c) * hw;
    double sum = 0.0;
    for (int i = 0; i < hw; ++i) sum += src[i];
    out.logits[c] = sum / hw;
  }

  if (tape) {
    tape->push(Tensor::of({3}, {static_cast<double>(fdim), static_cast<double>(trunk_out.dim(1)),
                                static_cast<double>(trunk_out.dim(2))}));
  }
  return out;
}

Tensor Discriminator::discriminate(const Tensor& x) const { return forward(x).logits; }

Tensor Discriminator::extract_features(const Tensor& x) const { return forward(x).features; }

Tensor Discriminator::backward(const Tensor& dlogits, const Tensor& dfeatures, Tape& tape) {
  const Tensor shape = tape.pop();
  const int fdim = static_cast<int>(shape[0]);
  const int h = static_cast<int>(shape[1]);
  const int w = static_cast<int>(shape[2]);
  const int hw = h * w;

  Tensor dhead_out({config_.n_classes, h, w});
  if (!dlogits.empty()) {
    for (int c = 0; c < config_.n_classes; ++c) {
      const double g = dlogits[c] / hw;
      double* dst = dhead_out.data() + static_cast<std::size_t>(c) * hw;
      for (int i = 0; i < hw; ++i) dst[i] = g;
    }
  }
  Tensor dtrunk = head_.backward(dhead_out, tape);
  if (!dfeatures.empty()) {
    for (int c = 0; c < fdim; ++c) {
      const double g = dfeatures[c] / hw;
      double* dst = dtrunk.data() + static_cast<std::size_t>(c) * hw;
      for (int i = 0; i < hw; ++i) dst[i] += g;
    }
  }
  return trunk_.backward(dtrunk, tape);
}

std::vector<nn::Param*> Discriminator::params() {
  std::vector<nn::Param*> out;
  trunk_.collect_params(out);
  head_.collect_params(out);
  return out;
}

void Discriminator::reinitialize_head(int n_classes, std::uint64_t seed) {
  if (n_classes < 2) throw std::invalid_argument("discriminator head needs n_classes >= 2");
  config_.n_classes = n_classes;
  head_ = build_head(config_.feature_dim(), n_classes, seed);
}

}  // namespace fewshot::model
