#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fewshot/model/checkpoint.hpp"
#include "fewshot/model/discriminator.hpp"
#include "fewshot/model/generator.hpp"
#include "fewshot/nn/optim.hpp"
#include "fewshot/train/image_provider.hpp"
#include "fewshot/train/losses.hpp"
#include "fewshot/train/sampler.hpp"

namespace fewshot::train {

/// Raw per-term values of the generator objective for one sample.
struct GeneratorTerms {
  double gan_g = 0.0;
  double recon = 0.0;
  double feat_match = 0.0;
};

/// Weights applied to the term gradients during backpropagation. Training
/// uses (1, lambda_recon, lambda_feat); the finite-difference checks isolate
/// one term by zeroing the others.
struct GeneratorTermWeights {
  double gan = 1.0;
  double recon = 0.0;
  double feat = 0.0;
};

/// Forward-only evaluation of the three generator loss terms on one sample.
GeneratorTerms generator_losses(model::Generator& gen, model::Discriminator& disc,
                                const Sample& sample, const TrainConfig& cfg);

/// Same values, plus weighted gradients accumulated into the generator
/// parameters (scaled by grad_scale). Gradients also accumulate into the
/// discriminator's buffers as a side effect; callers zero them before the
/// discriminator's own update.
GeneratorTerms generator_losses_with_grad(model::Generator& gen, model::Discriminator& disc,
                                          const Sample& sample, const TrainConfig& cfg,
                                          const GeneratorTermWeights& weights, double grad_scale);

/// Discriminator GAN loss on one sample with gradients accumulated into the
/// discriminator parameters (the generated image is treated as a constant).
double discriminator_loss_with_grad(model::Generator& gen, model::Discriminator& disc,
                                    const Sample& sample, const TrainConfig& cfg,
                                    double grad_scale);

/// Alternating minimax training: one discriminator update then one generator
/// update per step, both with RMSProp. Deterministic for a fixed seed, and
/// resumable bit-compatibly because batches depend only on (seed, iteration)
/// and the optimizer state travels in the checkpoint.
class Trainer {
 public:
  Trainer(model::Generator& gen, model::Discriminator& disc, TrainConfig cfg,
          std::vector<std::string> class_names);

  /// One alternating update; returns the losses each update was computed
  /// from. Throws TrainingDiverged on any non-finite loss.
  LossBreakdown step(const Batch& batch);

  /// Runs until max_iterations, checkpointing every cfg.checkpoint_every
  /// steps into checkpoint_dir and appending one JSON record per step to
  /// log_path (empty path disables logging). Returns the final snapshot,
  /// which is also saved as "ckpt-latest" in checkpoint_dir.
  model::Checkpoint run(const data::DatasetManifest& manifest, ImageProvider& provider,
                        const std::filesystem::path& checkpoint_dir,
                        const std::filesystem::path& log_path = {});

  model::Checkpoint snapshot();
  void restore(const model::Checkpoint& ckpt);

  /// Lower-level restore pieces, used when the class set changes (head
  /// reinitialization) and restore() cannot apply.
  void set_iteration(std::uint64_t iteration);
  void restore_optimizer_state(std::map<std::string, Tensor> opt_g,
                               std::map<std::string, Tensor> opt_d);

  std::uint64_t iteration() const { return iteration_; }
  const TrainConfig& config() const { return cfg_; }
  const std::vector<std::string>& class_names() const { return class_names_; }

 private:
  model::Generator& gen_;
  model::Discriminator& disc_;
  TrainConfig cfg_;
  std::vector<std::string> class_names_;
  nn::RmsProp opt_g_;
  nn::RmsProp opt_d_;
  std::uint64_t iteration_ = 0;
};

struct FineTuneOptions {
  double learning_rate = 1e-5;  // the training rate divided by 10
  std::uint64_t iterations = 0;
  bool reinit_head = false;
  std::uint64_t reinit_seed = 0;
  std::filesystem::path checkpoint_dir;
  std::filesystem::path log_path;
};

/// Continues from a checkpoint at the reduced learning rate. The manifest
/// must carry the checkpoint's classes unless reinit_head is set, in which
/// case a fresh prediction head (and head optimizer state) is created for
/// the new class set.
model::Checkpoint fine_tune(const model::Checkpoint& ckpt, const data::DatasetManifest& manifest,
                            ImageProvider& provider, const FineTuneOptions& options);

}  // namespace fewshot::train
