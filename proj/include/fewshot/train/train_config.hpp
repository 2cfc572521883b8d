#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace fewshot::train {

/// Optimization hyperparameters. The optimizer is RMSProp by construction;
/// only its decay and epsilon are tunable.
struct TrainConfig {
  double learning_rate = 1e-4;
  double lambda_recon = 0.1;
  double lambda_feat = 1.0;
  int batch_size = 4;
  int k_style = 1;
  std::uint64_t max_iterations = 0;
  std::uint64_t seed = 0;
  double rmsprop_decay = 0.99;
  double rmsprop_eps = 1e-8;
  std::uint64_t checkpoint_every = 1000;
  /// Fidelity knob: use the saturating generator objective log(1 - sigmoid)
  /// instead of the default non-saturating -log sigmoid.
  bool saturating_generator_loss = false;

  void validate() const;
  std::map<std::string, std::string> to_kv(const std::string& prefix) const;
  static TrainConfig from_kv(const std::map<std::string, std::string>& kv,
                             const std::string& prefix);
};

}  // namespace fewshot::train
