#include "fewshot/eval/protocol.hpp"

#include "fewshot/core/errors.hpp"
#include "fewshot/core/log.hpp"
#include "fewshot/core/rng.hpp"
#include "fewshot/train/sampler.hpp"

namespace fewshot::eval {

void EvalProtocol::validate() const {
  if (n_content_per_class < 1 || n_pairs < 1 || k_style < 1 || n_splits < 1) {
    throw InputError("eval protocol: all counts must be >= 1");
  }
  if (target_class.empty()) throw InputError("eval protocol: target class is required");
}

namespace {

std::vector<int> pick(Rng& rng, int pool_size, int count, const std::string& what) {
  if (pool_size >= count) return rng.sample_without_replacement(pool_size, count);
  log::warn("protocol: only " + std::to_string(pool_size) + " images available for " + what +
            ", sampling with replacement");
  return rng.sample_with_replacement(pool_size, count);
}

}  // namespace

MetricReport run_protocol(const model::Translator& model,
                          const data::DatasetManifest& train_manifest,
                          const data::DatasetManifest& style_manifest, const EvalProtocol& protocol,
                          train::ImageProvider& content_provider,
                          train::ImageProvider& style_provider, const LpipsBackbone& backbone,
                          const Classifier& classifier, const std::string& model_id) {
  protocol.validate();
  const std::string target = data::normalize_class_name(protocol.target_class);
  if (!style_manifest.has_class(target)) {
    throw InputError("style manifest has no class '" + target + "'");
  }
  const auto& style_pool = style_manifest.class_index().at(target);
  const int style_pool_size = static_cast<int>(style_pool.size());

  MetricReport report;
  report.k_style = protocol.k_style;
  report.n_content_per_class = protocol.n_content_per_class;
  report.n_pairs = protocol.n_pairs;
  report.seed = protocol.seed;
  report.model_id = model_id;

  for (const std::string& class_name : train::sorted_classes(train_manifest)) {
    // Independent stream per source class: results do not depend on which
    // other classes are evaluated or in what order.
    Rng rng(mix_seed(protocol.seed, fnv1a(class_name)));
    const auto& pool = train_manifest.class_index().at(class_name);

    const std::vector<int> content_picks = pick(rng, static_cast<int>(pool.size()),
                                                protocol.n_content_per_class, class_name);

    double lpips_sum = 0.0;
    std::vector<Tensor> translated;
    translated.reserve(static_cast<std::size_t>(protocol.n_content_per_class) * protocol.n_pairs * 2);

    for (int c : content_picks) {
      const Tensor x = content_provider.image(train_manifest.records()[pool[c]]);
      for (int pair = 0; pair < protocol.n_pairs; ++pair) {
        auto draw_styles = [&] {
          std::vector<Tensor> styles;
          styles.reserve(protocol.k_style);
          for (int idx : pick(rng, style_pool_size, protocol.k_style, target)) {
            styles.push_back(style_provider.image(style_manifest.records()[style_pool[idx]]));
          }
          return styles;
        };
        const Tensor t1 = model.translate(x, draw_styles());
        const Tensor t2 = model.translate(x, draw_styles());
        lpips_sum += lpips(t1, t2, backbone);
        translated.push_back(t1);
        translated.push_back(t2);
      }
    }

    ClassMetrics row;
    row.class_name = class_name;
    row.lpips_mean = lpips_sum / (static_cast<double>(protocol.n_content_per_class) * protocol.n_pairs);
    row.is_value = inception_score(translated, classifier, protocol.n_splits);
    report.rows.push_back(std::move(row));
  }

  compute_averages(report);
  return report;
}

}  // namespace fewshot::eval
