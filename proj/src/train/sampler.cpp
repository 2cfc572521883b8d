#include "fewshot/train/sampler.hpp"

#include <stdexcept>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/rng.hpp"
#include "fewshot/train/image_provider.hpp"

namespace fewshot::train {

std::vector<std::string> sorted_classes(const data::DatasetManifest& m) {
  std::vector<std::string> names;
  names.reserve(m.n_classes());
  for (const auto& [name, _] : m.class_index()) names.push_back(name);
  return names;  // std::map iterates in sorted order
}

BatchSpec sample_batch_spec(const data::DatasetManifest& m, const TrainConfig& cfg,
                            std::uint64_t iteration) {
  if (m.n_classes() < 2) {
    throw InputError("sampling requires at least 2 classes, manifest has " +
                     std::to_string(m.n_classes()));
  }
  const std::vector<std::string> classes = sorted_classes(m);
  Rng rng(mix_seed(cfg.seed, iteration));

  BatchSpec batch;
  batch.reserve(cfg.batch_size);
  for (int b = 0; b < cfg.batch_size; ++b) {
    SampleSpec s;
    s.content_class = rng.uniform_int(static_cast<int>(classes.size()));
    const auto& content_pool = m.class_index().at(classes[s.content_class]);
    s.content_index = content_pool[rng.uniform_int(static_cast<int>(content_pool.size()))];

    s.style_class = rng.uniform_int(static_cast<int>(classes.size()));
    const auto& style_pool = m.class_index().at(classes[s.style_class]);
    const int pool_size = static_cast<int>(style_pool.size());
    const std::vector<int> picks = pool_size >= cfg.k_style
                                       ? rng.sample_without_replacement(pool_size, cfg.k_style)
                                       : rng.sample_with_replacement(pool_size, cfg.k_style);
    s.style_indices.reserve(picks.size());
    for (int p : picks) s.style_indices.push_back(style_pool[p]);
    batch.push_back(std::move(s));
  }
  return batch;
}

Batch materialize_batch(const BatchSpec& spec, const data::DatasetManifest& m,
                        ImageProvider& provider) {
  Batch batch;
  batch.reserve(spec.size());
  for (const SampleSpec& s : spec) {
    Sample sample;
    sample.x = provider.image(m.records()[s.content_index]);
    sample.c_x = s.content_class;
    sample.c_y = s.style_class;
    sample.styles.reserve(s.style_indices.size());
    for (std::size_t idx : s.style_indices) sample.styles.push_back(provider.image(m.records()[idx]));
    batch.push_back(std::move(sample));
  }
  return batch;
}

}  // namespace fewshot::train
