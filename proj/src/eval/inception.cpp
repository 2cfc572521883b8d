#include "fewshot/eval/inception.hpp"

#include <algorithm>
#include <cmath>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/rng.hpp"

namespace fewshot::eval {

SmallConvClassifier::SmallConvClassifier(std::uint64_t seed, int n_classes, int channels,
                                         int in_channels)
    : n_classes_(n_classes),
      conv_([&] {
        Rng rng(mix_seed(seed, fnv1a("classifier.conv")));
        return nn::Conv2d("clf.conv", in_channels, channels, 3, 2, 1, rng);
      }()),
      fc_([&] {
        Rng rng(mix_seed(seed, fnv1a("classifier.fc")));
        return nn::Linear("clf.fc", channels, n_classes, rng);
      }()) {
  if (n_classes < 2) throw std::invalid_argument("classifier needs at least 2 classes");
}

std::vector<double> SmallConvClassifier::probabilities(const Tensor& image) const {
  const nn::ReLU relu;
  const nn::GlobalAvgPool pool;
  const Tensor logits =
      fc_.forward(pool.forward(relu.forward(conv_.forward(image, nullptr), nullptr), nullptr),
                  nullptr);
  double max_logit = logits[0];
  for (int c = 1; c < n_classes_; ++c) max_logit = std::max(max_logit, logits[c]);
  std::vector<double> probs(n_classes_);
  double sum = 0.0;
  for (int c = 0; c < n_classes_; ++c) {
    probs[c] = std::exp(logits[c] - max_logit);
    sum += probs[c];
  }
  for (double& p : probs) p /= sum;
  return probs;
}

double inception_score(const std::vector<Tensor>& images, const Classifier& classifier,
                       int n_splits) {
  std::vector<std::vector<double>> probs;
  probs.reserve(images.size());
  for (const Tensor& image : images) probs.push_back(classifier.probabilities(image));
  return inception_score_from_probs(probs, n_splits);
}

double inception_score_from_probs(const std::vector<std::vector<double>>& probs, int n_splits) {
  if (probs.empty()) throw InputError("inception score: no images");
  if (n_splits < 1 || static_cast<std::size_t>(n_splits) > probs.size()) {
    throw InputError("inception score: need 1 <= n_splits <= #images");
  }
  const std::size_t dim = probs.front().size();
  for (const auto& p : probs) {
    if (p.size() != dim) throw InputError("inception score: inconsistent distribution lengths");
    double sum = 0.0;
    for (double v : p) {
      if (v < 0.0) throw InputError("inception score: negative class probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      throw InputError("inception score: distribution does not sum to 1");
    }
  }

  const std::size_t n = probs.size();
  double score_sum = 0.0;
  std::size_t begin = 0;
  for (int s = 0; s < n_splits; ++s) {
    // Contiguous chunks whose sizes differ by at most one.
    const std::size_t count = n / n_splits + (static_cast<std::size_t>(s) < n % n_splits ? 1 : 0);
    const std::size_t end = begin + count;

    std::vector<double> marginal(dim, 0.0);
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < dim; ++j) marginal[j] += probs[i][j];
    }
    for (double& m : marginal) m /= static_cast<double>(count);

    double kl_sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        const double p = probs[i][j];
        if (p > 0.0) kl_sum += p * (std::log(p) - std::log(marginal[j]));
      }
    }
    score_sum += std::exp(kl_sum / static_cast<double>(count));
    begin = end;
  }
  return score_sum / n_splits;
}

}  // namespace fewshot::eval
