#pragma once

#include <vector>

#include "fewshot/core/tensor.hpp"
#include "fewshot/model/interfaces.hpp"
#include "fewshot/train/train_config.hpp"

namespace fewshot::train {

/// Per-step loss values; total_g always equals
/// gan_g + lambda_recon*recon + lambda_feat*feat_match.
struct LossBreakdown {
  double gan_d = 0.0;
  double gan_g = 0.0;
  double recon = 0.0;
  double feat_match = 0.0;
  double total_g = 0.0;
};

double sigmoid(double z);
/// Numerically stable log(1 + exp(z)); exactly 0 for very negative z.
double softplus(double z);

/// Binary cross-entropy on the two selected heads:
/// -log s(D^{c_x}(real)) - log(1 - s(D^{c_y}(fake))).
double gan_loss_discriminator(const model::Critic& d, const Tensor& real_x, int c_x,
                              const Tensor& fake_xbar, int c_y);

/// Non-saturating generator objective -log s(D^{c_y}(fake)); the saturating
/// flag switches to log(1 - s(.)), the literal minimax form.
double gan_loss_generator(const model::Critic& d, const Tensor& fake_xbar, int c_y,
                          bool saturating = false);

/// Mean absolute difference between x and g.translate(x, {x}).
double reconstruction_loss(const model::Translator& g, const Tensor& x);

/// Mean absolute difference between the critic features of xbar and the mean
/// critic features of the style images.
double feature_matching_loss(const model::Critic& d, const Tensor& xbar,
                             const std::vector<Tensor>& styles);

double total_generator_loss(double gan_g, double recon, double feat_match,
                            const TrainConfig& cfg);

}  // namespace fewshot::train
