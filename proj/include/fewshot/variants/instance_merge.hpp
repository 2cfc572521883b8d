#pragma once

#include <vector>

#include "fewshot/core/image_ops.hpp"
#include "fewshot/data/detector.hpp"
#include "fewshot/model/generator.hpp"

namespace fewshot::variants {

struct MergeConfig {
  /// Linear blend ramp in pixels at pasted box borders; 0 is a hard paste.
  int feather_width = 0;
  /// Highest-confidence detections processed per image.
  int max_objects = 8;
};

/// Object-aware translation by compositing: translate the whole frame, then
/// translate each detected object crop (resized through the generator
/// resolution) with the same style set and paste it back over its box.
/// Overlaps resolve by paste order — ascending confidence, so the most
/// confident object lands on top. No detections means the plain translation.
Tensor translate_detect_merge(const Tensor& x, const std::vector<Tensor>& styles,
                              data::ObjectDetector& detector, const model::Generator& gen,
                              const MergeConfig& cfg);

/// Object-aware translation in latent space: encode the whole frame, encode
/// each object crop, write the crop's content code into the frame code over
/// the latent region its box maps to, and decode once with the shared style.
Tensor translate_latent_merge(const Tensor& x, const std::vector<Tensor>& styles,
                              data::ObjectDetector& detector, const model::Generator& gen,
                              const MergeConfig& cfg);

/// Assembles the merged content code without decoding (exposed so its
/// region arithmetic can be checked cell by cell).
Tensor merge_content_codes(const Tensor& x, const std::vector<data::Detection>& detections,
                           const model::Generator& gen, const MergeConfig& cfg);

/// Maps a pixel box into the content-code grid through the downsampling
/// factor: floor on minima, ceil on maxima, clamped to the code bounds.
PixelBox latent_region(const data::Detection& det, int downsample_factor, int code_size);

}  // namespace fewshot::variants
