#include "fewshot/train/train_config.hpp"

#include "fewshot/core/errors.hpp"
#include "fewshot/core/serialize.hpp"

namespace fewshot::train {

namespace {

std::string fmt(double v) { return io::format_double(v); }

const std::string& kv_get(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw InputError("missing config key: " + key);
  return it->second;
}

}  // namespace

void TrainConfig::validate() const {
  // Zero is allowed so frozen-parameter regression checks can run through
  // the normal step path; negative rates are rejected.
  if (!(learning_rate >= 0.0)) throw InputError("train config: learning_rate must be >= 0");
  if (lambda_recon < 0.0 || lambda_feat < 0.0) {
    throw InputError("train config: loss weights must be >= 0");
  }
  if (batch_size < 1) throw InputError("train config: batch_size must be >= 1");
  if (k_style < 1) throw InputError("train config: k_style must be >= 1");
  if (!(rmsprop_decay > 0.0 && rmsprop_decay < 1.0)) {
    throw InputError("train config: rmsprop_decay must lie in (0, 1)");
  }
  if (!(rmsprop_eps > 0.0)) throw InputError("train config: rmsprop_eps must be > 0");
}

std::map<std::string, std::string> TrainConfig::to_kv(const std::string& prefix) const {
  return {
      {prefix + "learning_rate", fmt(learning_rate)},
      {prefix + "lambda_recon", fmt(lambda_recon)},
      {prefix + "lambda_feat", fmt(lambda_feat)},
      {prefix + "batch_size", std::to_string(batch_size)},
      {prefix + "k_style", std::to_string(k_style)},
      {prefix + "max_iterations", std::to_string(max_iterations)},
      {prefix + "seed", std::to_string(seed)},
      {prefix + "rmsprop_decay", fmt(rmsprop_decay)},
      {prefix + "rmsprop_eps", fmt(rmsprop_eps)},
      {prefix + "checkpoint_every", std::to_string(checkpoint_every)},
      {prefix + "saturating_generator_loss", saturating_generator_loss ? "1" : "0"},
  };
}

TrainConfig TrainConfig::from_kv(const std::map<std::string, std::string>& kv,
                                 const std::string& prefix) {
  TrainConfig c;
  c.learning_rate = std::stod(kv_get(kv, prefix + "learning_rate"));
  c.lambda_recon = std::stod(kv_get(kv, prefix + "lambda_recon"));
  c.lambda_feat = std::stod(kv_get(kv, prefix + "lambda_feat"));
  c.batch_size = std::stoi(kv_get(kv, prefix + "batch_size"));
  c.k_style = std::stoi(kv_get(kv, prefix + "k_style"));
  c.max_iterations = std::stoull(kv_get(kv, prefix + "max_iterations"));
  c.seed = std::stoull(kv_get(kv, prefix + "seed"));
  c.rmsprop_decay = std::stod(kv_get(kv, prefix + "rmsprop_decay"));
  c.rmsprop_eps = std::stod(kv_get(kv, prefix + "rmsprop_eps"));
  c.checkpoint_every = std::stoull(kv_get(kv, prefix + "checkpoint_every"));
  c.saturating_generator_loss = kv_get(kv, prefix + "saturating_generator_loss") == "1";
  c.validate();
  return c;
}

}  // namespace fewshot::train
