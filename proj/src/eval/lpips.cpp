#include "fewshot/eval/lpips.hpp"

#include <cmath>
#include <stdexcept>

#include "fewshot/core/rng.hpp"

namespace fewshot::eval {

RandomConvBackbone::RandomConvBackbone(std::uint64_t seed, std::vector<int> widths, int stride,
                                       int in_channels) {
  if (widths.empty()) throw std::invalid_argument("backbone needs at least one layer");
  Rng rng(mix_seed(seed, fnv1a("lpips.backbone")));
  int ch = in_channels;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    convs_.emplace_back("lpips.conv" + std::to_string(i), ch, widths[i], 3, stride, 1, rng);
    ch = widths[i];
    Tensor w({widths[i]});
    for (int c = 0; c < widths[i]; ++c) w[c] = rng.uniform(0.0, 1.0);
    weights_.push_back(std::move(w));
  }
}

std::vector<Tensor> RandomConvBackbone::features(const Tensor& image) const {
  std::vector<Tensor> out;
  out.reserve(convs_.size());
  const nn::ReLU relu;
  Tensor h = image;
  for (const nn::Conv2d& conv : convs_) {
    h = relu.forward(conv.forward(h, nullptr), nullptr);
    out.push_back(h);
  }
  return out;
}

const std::vector<Tensor>& RandomConvBackbone::layer_weights() const { return weights_; }

double lpips(const Tensor& a, const Tensor& b, const LpipsBackbone& backbone) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("lpips: image shapes differ, " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  const std::vector<Tensor> fa = backbone.features(a);
  const std::vector<Tensor> fb = backbone.features(b);
  const std::vector<Tensor>& weights = backbone.layer_weights();
  if (fa.size() != weights.size()) {
    throw std::invalid_argument("lpips: backbone returned an unexpected layer count");
  }

  constexpr double kNormEps = 1e-10;
  double total = 0.0;
  for (std::size_t layer = 0; layer < fa.size(); ++layer) {
    const Tensor& u = fa[layer];
    const Tensor& v = fb[layer];
    const Tensor& w = weights[layer];
    const int channels = u.dim(0), height = u.dim(1), width = u.dim(2);
    double layer_sum = 0.0;
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double nu = 0.0, nv = 0.0;
        for (int c = 0; c < channels; ++c) {
          nu += u.at(c, y, x) * u.at(c, y, x);
          nv += v.at(c, y, x) * v.at(c, y, x);
        }
        const double inv_u = 1.0 / std::sqrt(nu + kNormEps);
        const double inv_v = 1.0 / std::sqrt(nv + kNormEps);
        for (int c = 0; c < channels; ++c) {
          const double d = u.at(c, y, x) * inv_u - v.at(c, y, x) * inv_v;
          layer_sum += w[c] * d * d;
        }
      }
    }
    total += layer_sum / (height * width);
  }
  return total;
}

}  // namespace fewshot::eval
