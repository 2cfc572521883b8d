#pragma once

#include <cstdint>
#include <string>

#include "fewshot/data/manifest.hpp"
#include "fewshot/eval/inception.hpp"
#include "fewshot/eval/lpips.hpp"
#include "fewshot/eval/report.hpp"
#include "fewshot/model/interfaces.hpp"
#include "fewshot/train/image_provider.hpp"

namespace fewshot::eval {

struct EvalProtocol {
  int n_content_per_class = 20;
  int n_pairs = 5;
  int k_style = 2;
  std::string target_class;
  std::uint64_t seed = 0;
  int n_splits = 1;

  void validate() const;
};

/// Translation diversity protocol: per source class, pick
/// n_content_per_class content images; translate each one n_pairs times as
/// a pair, every pair member using an independently drawn set of k_style
/// target-class style images. The perceptual distance is averaged over all
/// pairs, the diversity score is computed over all translated outputs, and
/// all sampling is derived from (seed, class), so reports are byte-stable
/// and independent of scheduling.
MetricReport run_protocol(const model::Translator& model,
                          const data::DatasetManifest& train_manifest,
                          const data::DatasetManifest& style_manifest, const EvalProtocol& protocol,
                          train::ImageProvider& content_provider,
                          train::ImageProvider& style_provider, const LpipsBackbone& backbone,
                          const Classifier& classifier, const std::string& model_id);

}  // namespace fewshot::eval
