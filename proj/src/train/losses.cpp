#include "fewshot/train/losses.hpp"

#include <cmath>
#include <stdexcept>

#include "fewshot/core/errors.hpp"

namespace fewshot::train {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw TrainingDiverged(std::string(what) + " is not finite");
  }
}

double mean_abs_diff(const Tensor& a, const Tensor& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch " + a.shape_string() +
                                " vs " + b.shape_string());
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace

double sigmoid(double z) { return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

double softplus(double z) {
  if (z > 30.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double gan_loss_discriminator(const model::Critic& d, const Tensor& real_x, int c_x,
                              const Tensor& fake_xbar, int c_y) {
  const double loss = softplus(-d.realness(real_x, c_x)) + softplus(d.realness(fake_xbar, c_y));
  require_finite(loss, "discriminator GAN loss");
  return loss;
}

double gan_loss_generator(const model::Critic& d, const Tensor& fake_xbar, int c_y,
                          bool saturating) {
  const double z = d.realness(fake_xbar, c_y);
  const double loss = saturating ? -softplus(z) : softplus(-z);
  require_finite(loss, "generator GAN loss");
  return loss;
}

double reconstruction_loss(const model::Translator& g, const Tensor& x) {
  const Tensor xhat = g.translate(x, {x});
  const double loss = mean_abs_diff(x, xhat, "reconstruction loss");
  require_finite(loss, "reconstruction loss");
  return loss;
}

double feature_matching_loss(const model::Critic& d, const Tensor& xbar,
                             const std::vector<Tensor>& styles) {
  if (styles.empty()) {
    throw std::invalid_argument("feature_matching_loss: need at least one style image");
  }
  const Tensor f_out = d.extract_features(xbar);
  Tensor f_mean = Tensor::zeros_like(f_out);
  for (const Tensor& y : styles) f_mean += d.extract_features(y);
  f_mean *= 1.0 / static_cast<double>(styles.size());
  const double loss = mean_abs_diff(f_out, f_mean, "feature matching loss");
  require_finite(loss, "feature matching loss");
  return loss;
}

double total_generator_loss(double gan_g, double recon, double feat_match,
                            const TrainConfig& cfg) {
  const double total = gan_g + cfg.lambda_recon * recon + cfg.lambda_feat * feat_match;
  require_finite(total, "total generator loss");
  return total;
}

}  // namespace fewshot::train
