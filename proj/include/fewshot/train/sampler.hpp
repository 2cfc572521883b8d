#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fewshot/core/tensor.hpp"
#include "fewshot/data/manifest.hpp"
#include "fewshot/train/train_config.hpp"

namespace fewshot::train {

/// Record indices for one training sample, before any image is decoded.
struct SampleSpec {
  std::size_t content_index = 0;
  int content_class = 0;
  std::vector<std::size_t> style_indices;
  int style_class = 0;
};

/// A materialized sample: content image, its class, the K style images and
/// theirs.
struct Sample {
  Tensor x;
  int c_x = 0;
  std::vector<Tensor> styles;
  int c_y = 0;
};

using BatchSpec = std::vector<SampleSpec>;
using Batch = std::vector<Sample>;

/// Class names in the fixed (sorted) order that defines class indices.
std::vector<std::string> sorted_classes(const data::DatasetManifest& m);

/// Draws batch_size samples: content class and image uniform, style class
/// uniform (it may equal the content class), K style images without
/// replacement inside the style class (with replacement when the class is
/// smaller than K). The stream is derived from (seed, iteration) alone, so
/// any iteration's batch can be regenerated independently of history.
BatchSpec sample_batch_spec(const data::DatasetManifest& m, const TrainConfig& cfg,
                            std::uint64_t iteration);

/// Decodes a spec through an image source.
class ImageProvider;
Batch materialize_batch(const BatchSpec& spec, const data::DatasetManifest& m,
                        ImageProvider& provider);

}  // namespace fewshot::train
