#include "fewshot/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/rng.hpp"

namespace fewshot::train {

namespace {

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw TrainingDiverged(std::string(what) + " is not finite");
}

void check_class(int c, int n_classes, const char* what) {
  if (c < 0 || c >= n_classes) {
    throw std::out_of_range(std::string(what) + ": class index " + std::to_string(c) +
                            " out of range for " + std::to_string(n_classes) + " classes");
  }
}

constexpr const char kOptGPrefix[] = "opt_g.";
constexpr const char kOptDPrefix[] = "opt_d.";
constexpr const char kHeadPrefix[] = "disc.head";

}  // namespace

GeneratorTerms generator_losses(model::Generator& gen, model::Discriminator& disc,
                                const Sample& sample, const TrainConfig& cfg) {
  const Tensor xbar = gen.translate(sample.x, sample.styles);
  GeneratorTerms t;
  t.gan_g = gan_loss_generator(disc, xbar, sample.c_y, cfg.saturating_generator_loss);
  t.recon = reconstruction_loss(gen, sample.x);
  t.feat_match = feature_matching_loss(disc, xbar, sample.styles);
  return t;
}

GeneratorTerms generator_losses_with_grad(model::Generator& gen, model::Discriminator& disc,
                                          const Sample& sample, const TrainConfig& cfg,
                                          const GeneratorTermWeights& weights, double grad_scale) {
  const int n_classes = disc.config().n_classes;
  check_class(sample.c_y, n_classes, "generator loss");
  const int k = static_cast<int>(sample.styles.size());
  if (k == 0) throw std::invalid_argument("generator loss: sample has no style images");

  GeneratorTerms terms;

  // Adversarial + feature-matching path: one full generator forward whose
  // output feeds the (frozen) discriminator.
  std::vector<nn::Tape> style_tapes(k);
  std::vector<Tensor> codes;
  codes.reserve(k);
  for (int i = 0; i < k; ++i) {
    codes.push_back(gen.encode_style_one(sample.styles[i], &style_tapes[i]));
  }
  const Tensor style_code = model::Generator::average_style_codes(codes);

  nn::Tape mlp_tape;
  const model::AdaInParams adain = gen.compute_adain_params(style_code, &mlp_tape);
  nn::Tape content_tape;
  const Tensor content = gen.encode_content(sample.x, &content_tape);
  nn::Tape dec_tape;
  const Tensor xbar = gen.decode(content, adain, &dec_tape);

  nn::Tape d_tape;
  const model::Discriminator::Output d_out = disc.forward(xbar, &d_tape);

  Tensor feat_target = Tensor::zeros_like(d_out.features);
  for (const Tensor& y : sample.styles) feat_target += disc.extract_features(y);
  feat_target *= 1.0 / static_cast<double>(k);

  const double zy = d_out.logits[sample.c_y];
  terms.gan_g = cfg.saturating_generator_loss ? -softplus(zy) : softplus(-zy);
  require_finite(terms.gan_g, "generator GAN loss");

  const int fdim = d_out.features.dim(0);
  double fm = 0.0;
  for (int j = 0; j < fdim; ++j) fm += std::abs(d_out.features[j] - feat_target[j]);
  terms.feat_match = fm / fdim;
  require_finite(terms.feat_match, "feature matching loss");

  Tensor dlogits({n_classes});
  dlogits[sample.c_y] = weights.gan * grad_scale *
                        (cfg.saturating_generator_loss ? -sigmoid(zy) : sigmoid(zy) - 1.0);
  Tensor dfeat({fdim});
  for (int j = 0; j < fdim; ++j) {
    dfeat[j] = weights.feat * grad_scale * sgn(d_out.features[j] - feat_target[j]) / fdim;
  }

  const Tensor dxbar = disc.backward(dlogits, dfeat, d_tape);
  model::Generator::DecodeGrads dg = gen.decode_backward(dxbar, dec_tape);
  Tensor dstyle = gen.adain_params_backward(dg.dadain_flat, mlp_tape);
  gen.content_backward(dg.dcontent, content_tape);
  dstyle *= 1.0 / static_cast<double>(k);
  for (int i = k - 1; i >= 0; --i) gen.style_one_backward(dstyle, style_tapes[i]);

  // Reconstruction path: a second generator forward on (x, {x}).
  nn::Tape style2_tape;
  const Tensor code2 = gen.encode_style_one(sample.x, &style2_tape);
  nn::Tape mlp2_tape;
  const model::AdaInParams adain2 = gen.compute_adain_params(code2, &mlp2_tape);
  nn::Tape content2_tape;
  const Tensor content2 = gen.encode_content(sample.x, &content2_tape);
  nn::Tape dec2_tape;
  const Tensor xhat = gen.decode(content2, adain2, &dec2_tape);

  const std::size_t numel = xhat.size();
  double recon = 0.0;
  for (std::size_t i = 0; i < numel; ++i) recon += std::abs(sample.x[i] - xhat[i]);
  terms.recon = recon / static_cast<double>(numel);
  require_finite(terms.recon, "reconstruction loss");

  Tensor dxhat = Tensor::zeros_like(xhat);
  const double w = weights.recon * grad_scale / static_cast<double>(numel);
  for (std::size_t i = 0; i < numel; ++i) dxhat[i] = w * sgn(xhat[i] - sample.x[i]);

  model::Generator::DecodeGrads dg2 = gen.decode_backward(dxhat, dec2_tape);
  const Tensor dstyle2 = gen.adain_params_backward(dg2.dadain_flat, mlp2_tape);
  gen.content_backward(dg2.dcontent, content2_tape);
  gen.style_one_backward(dstyle2, style2_tape);

  return terms;
}

double discriminator_loss_with_grad(model::Generator& gen, model::Discriminator& disc,
                                    const Sample& sample, const TrainConfig& cfg,
                                    double grad_scale) {
  (void)cfg;
  const int n_classes = disc.config().n_classes;
  check_class(sample.c_x, n_classes, "discriminator loss");
  check_class(sample.c_y, n_classes, "discriminator loss");

  // The generated image is a constant for the discriminator update.
  const Tensor xbar = gen.translate(sample.x, sample.styles);

  nn::Tape real_tape;
  const model::Discriminator::Output real_out = disc.forward(sample.x, &real_tape);
  nn::Tape fake_tape;
  const model::Discriminator::Output fake_out = disc.forward(xbar, &fake_tape);

  const double zr = real_out.logits[sample.c_x];
  const double zf = fake_out.logits[sample.c_y];
  const double loss = softplus(-zr) + softplus(zf);
  require_finite(loss, "discriminator GAN loss");

  Tensor dreal({n_classes});
  dreal[sample.c_x] = grad_scale * (sigmoid(zr) - 1.0);
  Tensor dfake({n_classes});
  dfake[sample.c_y] = grad_scale * sigmoid(zf);

  const Tensor no_features;
  disc.backward(dfake, no_features, fake_tape);
  disc.backward(dreal, no_features, real_tape);
  return loss;
}

Trainer::Trainer(model::Generator& gen, model::Discriminator& disc, TrainConfig cfg,
                 std::vector<std::string> class_names)
    : gen_(gen),
      disc_(disc),
      cfg_(std::move(cfg)),
      class_names_(std::move(class_names)),
      opt_g_(cfg_.learning_rate, cfg_.rmsprop_decay, cfg_.rmsprop_eps),
      opt_d_(cfg_.learning_rate, cfg_.rmsprop_decay, cfg_.rmsprop_eps) {
  cfg_.validate();
  if (static_cast<int>(class_names_.size()) != disc_.config().n_classes) {
    throw InputError("trainer: discriminator has " + std::to_string(disc_.config().n_classes) +
                     " heads but " + std::to_string(class_names_.size()) + " classes were given");
  }
}

LossBreakdown Trainer::step(const Batch& batch) {
  if (batch.empty()) throw std::invalid_argument("train step: empty batch");
  const double inv = 1.0 / static_cast<double>(batch.size());

  const std::vector<nn::Param*> d_params = disc_.params();
  const std::vector<nn::Param*> g_params = gen_.params();

  nn::zero_grads(d_params);
  double gan_d = 0.0;
  for (const Sample& s : batch) gan_d += discriminator_loss_with_grad(gen_, disc_, s, cfg_, inv);
  gan_d *= inv;
  opt_d_.step(d_params);

  nn::zero_grads(g_params);
  nn::zero_grads(d_params);  // the generator backward passes through them
  const GeneratorTermWeights weights{1.0, cfg_.lambda_recon, cfg_.lambda_feat};
  double gan_g = 0.0, recon = 0.0, feat = 0.0;
  for (const Sample& s : batch) {
    const GeneratorTerms t = generator_losses_with_grad(gen_, disc_, s, cfg_, weights, inv);
    gan_g += t.gan_g;
    recon += t.recon;
    feat += t.feat_match;
  }
  gan_g *= inv;
  recon *= inv;
  feat *= inv;
  opt_g_.step(g_params);

  LossBreakdown lb;
  lb.gan_d = gan_d;
  lb.gan_g = gan_g;
  lb.recon = recon;
  lb.feat_match = feat;
  lb.total_g = total_generator_loss(gan_g, recon, feat, cfg_);
  ++iteration_;
  return lb;
}

model::Checkpoint Trainer::snapshot() {
  model::Checkpoint ckpt;
  ckpt.gen_config = gen_.config();
  ckpt.disc_config = disc_.config();
  ckpt.class_names = class_names_;
  ckpt.iteration = iteration_;
  ckpt.extra = cfg_.to_kv("train.");
  model::capture_params(gen_, disc_, ckpt.tensors);
  for (const auto& [name, v] : opt_g_.state()) ckpt.tensors[kOptGPrefix + name] = v;
  for (const auto& [name, v] : opt_d_.state()) ckpt.tensors[kOptDPrefix + name] = v;
  return ckpt;
}

void Trainer::restore(const model::Checkpoint& ckpt) {
  if (ckpt.class_names != class_names_) {
    throw InputError("checkpoint was trained on a different class set");
  }
  model::restore_params(ckpt, gen_, disc_);
  set_iteration(ckpt.iteration);
  std::map<std::string, Tensor> og, od;
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind(kOptGPrefix, 0) == 0) og[name.substr(6)] = t;
    else if (name.rfind(kOptDPrefix, 0) == 0) od[name.substr(6)] = t;
  }
  restore_optimizer_state(std::move(og), std::move(od));
}

void Trainer::set_iteration(std::uint64_t iteration) { iteration_ = iteration; }

void Trainer::restore_optimizer_state(std::map<std::string, Tensor> opt_g,
                                      std::map<std::string, Tensor> opt_d) {
  opt_g_.restore_state(std::move(opt_g));
  opt_d_.restore_state(std::move(opt_d));
}

model::Checkpoint Trainer::run(const data::DatasetManifest& manifest, ImageProvider& provider,
                               const std::filesystem::path& checkpoint_dir,
                               const std::filesystem::path& log_path) {
  if (sorted_classes(manifest) != class_names_) {
    throw InputError("training manifest classes do not match the trainer's class set");
  }
  std::filesystem::create_directories(checkpoint_dir);

  std::ofstream log_stream;
  if (!log_path.empty()) {
    if (log_path.has_parent_path()) std::filesystem::create_directories(log_path.parent_path());
    log_stream.open(log_path, std::ios::app);
    if (!log_stream) throw std::runtime_error("cannot open training log: " + log_path.string());
  }

  while (iteration_ < cfg_.max_iterations) {
    const BatchSpec spec = sample_batch_spec(manifest, cfg_, iteration_);
    const Batch batch = materialize_batch(spec, manifest, provider);

    const auto start = std::chrono::steady_clock::now();
    const LossBreakdown lb = step(batch);
    const double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

    if (log_stream) {
      nlohmann::json record;
      record["iteration"] = iteration_;
      record["gan_d"] = lb.gan_d;
      record["gan_g"] = lb.gan_g;
      record["recon"] = lb.recon;
      record["feat_match"] = lb.feat_match;
      record["total_g"] = lb.total_g;
      record["wall_ms"] = wall_ms;
      log_stream << record.dump() << "\n";
      log_stream.flush();
    }

    if (cfg_.checkpoint_every > 0 && iteration_ % cfg_.checkpoint_every == 0 &&
        iteration_ < cfg_.max_iterations) {
      snapshot().save(checkpoint_dir / ("ckpt-" + std::to_string(iteration_) + ".fsckpt"));
    }
  }

  model::Checkpoint final_ckpt = snapshot();
  final_ckpt.save(checkpoint_dir / "ckpt-latest.fsckpt");
  return final_ckpt;
}

model::Checkpoint fine_tune(const model::Checkpoint& ckpt, const data::DatasetManifest& manifest,
                            ImageProvider& provider, const FineTuneOptions& options) {
  const std::vector<std::string> classes = sorted_classes(manifest);

  TrainConfig cfg;
  try {
    cfg = TrainConfig::from_kv(ckpt.extra, "train.");
  } catch (const InputError&) {
    // Checkpoint without trainer metadata: keep defaults.
  }
  cfg.learning_rate = options.learning_rate;
  cfg.max_iterations = ckpt.iteration + options.iterations;

  model::Generator gen(ckpt.gen_config, /*seed=*/0);
  model::Discriminator disc(ckpt.disc_config, /*seed=*/0);
  model::restore_params(ckpt, gen, disc);

  std::map<std::string, Tensor> og, od;
  for (const auto& [name, t] : ckpt.tensors) {
    if (name.rfind(kOptGPrefix, 0) == 0) og[name.substr(6)] = t;
    else if (name.rfind(kOptDPrefix, 0) == 0) od[name.substr(6)] = t;
  }

  if (classes != ckpt.class_names) {
    if (!options.reinit_head) {
      throw InputError(
          "fine-tune manifest classes differ from the checkpoint; pass the head "
          "reinitialization flag to retrain the prediction head");
    }
    disc.reinitialize_head(static_cast<int>(classes.size()), options.reinit_seed);
    for (auto it = od.begin(); it != od.end();) {
      it = it->first.rfind(kHeadPrefix, 0) == 0 ? od.erase(it) : std::next(it);
    }
  }

  Trainer trainer(gen, disc, cfg, classes);
  trainer.set_iteration(ckpt.iteration);
  trainer.restore_optimizer_state(std::move(og), std::move(od));
  return trainer.run(manifest, provider, options.checkpoint_dir, options.log_path);
}

}  // namespace fewshot::train
