#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fewshot/core/errors.hpp"
#include "fewshot/train/losses.hpp"
#include "helpers.hpp"

using namespace fewshot;
using namespace fewshot::train;

namespace {

// Critic whose logits all equal the input's first element; features are the
// first `fdim` elements. Lets tests drive scores through crafted tensors.
struct EchoCritic : model::Critic {
  int n_classes = 3;
  int fdim = 4;

  Tensor discriminate(const Tensor& x) const override {
    Tensor logits({n_classes});
    logits.fill(x[0]);
    return logits;
  }
  Tensor extract_features(const Tensor& x) const override {
    Tensor f({fdim});
    for (int i = 0; i < fdim; ++i) f[i] = x[i];
    return f;
  }
};

struct IdentityTranslator : model::Translator {
  Tensor translate(const Tensor& x, const std::vector<Tensor>&) const override { return x; }
};

struct OffsetTranslator : model::Translator {
  double delta;
  explicit OffsetTranslator(double d) : delta(d) {}
  Tensor translate(const Tensor& x, const std::vector<Tensor>&) const override {
    Tensor y = x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += delta;
    return y;
  }
};

Tensor filled(double v, std::vector<int> shape = {1, 2, 2}) {
  Tensor t(std::move(shape));
  t.fill(v);
  return t;
}

double logit(double p) { return std::log(p / (1.0 - p)); }

}  // namespace

TEST_CASE("a perfect discriminator has exactly zero GAN loss") {
  EchoCritic d;
  // Saturated logits: sigmoid is exactly 1 on the real side and 0 on the
  // fake side at double precision.
  CHECK(gan_loss_discriminator(d, filled(800.0), 0, filled(-800.0), 1) == 0.0);
}

TEST_CASE("coin-flip discriminator scores 2 log 2") {
  EchoCritic d;
  const double loss = gan_loss_discriminator(d, filled(0.0), 0, filled(0.0), 2);
  CHECK(loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("generator GAN loss zero and half cases") {
  EchoCritic d;
  CHECK(gan_loss_generator(d, filled(800.0), 1) == 0.0);
  CHECK(gan_loss_generator(d, filled(0.0), 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("generator GAN loss decreases in the fooling probability") {
  EchoCritic d;
  double prev = 1e18;
  for (const double p : {0.1, 0.5, 0.9}) {
    const double loss = gan_loss_generator(d, filled(logit(p)), 0);
    CHECK(loss < prev);
    prev = loss;
  }
  // The saturating form is also decreasing.
  prev = 1e18;
  for (const double p : {0.1, 0.5, 0.9}) {
    const double loss = gan_loss_generator(d, filled(logit(p)), 0, /*saturating=*/true);
    CHECK(loss < prev);
    prev = loss;
  }
}

TEST_CASE("reconstruction loss zero and constant-offset cases") {
  Rng rng(3);
  const Tensor x = testutil::random_tensor({3, 4, 4}, rng);
  IdentityTranslator id;
  CHECK(reconstruction_loss(id, x) == 0.0);

  OffsetTranslator off(0.125);
  CHECK(reconstruction_loss(off, x) == doctest::Approx(0.125).epsilon(1e-12));

  OffsetTranslator neg(-0.25);
  CHECK(reconstruction_loss(neg, x) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(reconstruction_loss(neg, x) >= 0.0);
}

TEST_CASE("feature matching zero case and hand-computed fixture") {
  EchoCritic d;
  // u, v are style features; w the translation's. Features are the first 4
  // tensor elements under EchoCritic.
  const Tensor u = Tensor::of({1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
  const Tensor v = Tensor::of({1, 2, 2}, {2.0, 0.0, 1.0, -4.0});
  const Tensor w = Tensor::of({1, 2, 2}, {1.0, 1.5, 2.5, 0.5});

  // Mean features (1.5, 1.0, 2.0, 0.0); |w - mean| = (0.5, 0.5, 0.5, 0.5).
  CHECK(feature_matching_loss(d, w, {u, v}) == doctest::Approx(0.5).epsilon(1e-12));

  // K = 1 reduces to a plain feature distance.
  CHECK(feature_matching_loss(d, w, {u}) ==
        doctest::Approx((0.0 + 0.5 + 0.5 + 3.5) / 4.0).epsilon(1e-12));

  // Matching the mean exactly gives zero.
  const Tensor mean = Tensor::of({1, 2, 2}, {1.5, 1.0, 2.0, 0.0});
  CHECK(feature_matching_loss(d, mean, {u, v}) == 0.0);

  CHECK_THROWS_AS(feature_matching_loss(d, w, {}), std::invalid_argument);
}

TEST_CASE("total generator loss arithmetic") {
  TrainConfig cfg;  // lambda_recon = 0.1, lambda_feat = 1
  CHECK(total_generator_loss(1.0, 2.0, 3.0, cfg) == doctest::Approx(4.2).epsilon(1e-15));
  CHECK(total_generator_loss(0.0, 0.0, 0.0, cfg) == 0.0);

  TrainConfig ablated = cfg;
  ablated.lambda_recon = 0.0;
  ablated.lambda_feat = 0.0;
  CHECK(total_generator_loss(1.7, 9.0, 9.0, ablated) == 1.7);
}

TEST_CASE("total generator loss is linear in recon and feature terms") {
  TrainConfig cfg;
  cfg.lambda_recon = 0.3;
  cfg.lambda_feat = 2.0;
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    const double g = rng.uniform(0, 2), r = rng.uniform(0, 2), f = rng.uniform(0, 2);
    const double base = total_generator_loss(g, 0.0, 0.0, cfg);
    CHECK(total_generator_loss(g, r, 0.0, cfg) - base == doctest::Approx(0.3 * r).epsilon(1e-12));
    CHECK(total_generator_loss(g, 0.0, f, cfg) - base == doctest::Approx(2.0 * f).epsilon(1e-12));
  }
}

TEST_CASE("non-finite losses raise the divergence error") {
  EchoCritic d;
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(total_generator_loss(inf, 0, 0, TrainConfig{}), TrainingDiverged);
  CHECK_THROWS_AS((void)gan_loss_generator(d, filled(-inf), 0), TrainingDiverged);
}
