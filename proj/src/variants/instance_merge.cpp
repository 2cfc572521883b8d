#include "fewshot/variants/instance_merge.hpp"

#include <algorithm>

#include "fewshot/core/log.hpp"

namespace fewshot::variants {

namespace {

/// Detections to process, highest confidence first, capped at max_objects.
std::vector<data::Detection> select_objects(data::ObjectDetector& detector, const Tensor& x,
                                            const MergeConfig& cfg) {
  std::vector<data::Detection> dets = detector.detect(x);
  data::sort_by_confidence(dets);
  for (const data::Detection& d : dets) data::validate_detection(d, x.dim(2), x.dim(1));
  if (static_cast<int>(dets.size()) > cfg.max_objects) dets.resize(cfg.max_objects);
  return dets;
}

}  // namespace

PixelBox latent_region(const data::Detection& det, int downsample_factor, int code_size) {
  const double f = static_cast<double>(downsample_factor);
  return snap_box(det.x_min / f, det.y_min / f, det.x_max / f, det.y_max / f, code_size,
                  code_size);
}

Tensor translate_detect_merge(const Tensor& x, const std::vector<Tensor>& styles,
                              data::ObjectDetector& detector, const model::Generator& gen,
                              const MergeConfig& cfg) {
  const Tensor style_code = gen.encode_style(styles);
  const model::AdaInParams adain = gen.compute_adain_params(style_code);
  Tensor global = gen.decode(gen.encode_content(x), adain);

  std::vector<data::Detection> dets = select_objects(detector, x, cfg);
  const int size = gen.config().image_size;

  // Paste in ascending confidence so the most confident box overwrites last.
  for (auto it = dets.rbegin(); it != dets.rend(); ++it) {
    const PixelBox box = snap_box(it->x_min, it->y_min, it->x_max, it->y_max, x.dim(2), x.dim(1));
    if (box.empty()) continue;
    const Tensor crop_full = resize_bilinear(crop(x, box), size, size);
    const Tensor translated = gen.decode(gen.encode_content(crop_full), adain);
    paste(global, resize_bilinear(translated, box.height(), box.width()), box, cfg.feather_width);
  }
  return global;
}

Tensor merge_content_codes(const Tensor& x, const std::vector<data::Detection>& detections,
                           const model::Generator& gen, const MergeConfig& cfg) {
  Tensor code = gen.encode_content(x);
  const int size = gen.config().image_size;
  const int factor = 1 << gen.config().n_downsample;
  const int code_size = gen.config().code_size();

  std::vector<data::Detection> dets = detections;
  data::sort_by_confidence(dets);
  if (static_cast<int>(dets.size()) > cfg.max_objects) dets.resize(cfg.max_objects);

  for (auto it = dets.rbegin(); it != dets.rend(); ++it) {
    const PixelBox box = snap_box(it->x_min, it->y_min, it->x_max, it->y_max, x.dim(2), x.dim(1));
    const PixelBox region = latent_region(*it, factor, code_size);
    if (box.empty() || region.empty()) {
      log::warn("latent merge: detection '" + it->label + "' maps to an empty region, skipped");
      continue;
    }
    const Tensor crop_full = resize_bilinear(crop(x, box), size, size);
    const Tensor object_code = gen.encode_content(crop_full);
    paste(code, resize_bilinear(object_code, region.height(), region.width()), region, 0);
  }
  return code;
}

Tensor translate_latent_merge(const Tensor& x, const std::vector<Tensor>& styles,
                              data::ObjectDetector& detector, const model::Generator& gen,
                              const MergeConfig& cfg) {
  std::vector<data::Detection> dets = detector.detect(x);
  for (const data::Detection& d : dets) data::validate_detection(d, x.dim(2), x.dim(1));
  const Tensor merged = merge_content_codes(x, dets, gen, cfg);
  const Tensor style_code = gen.encode_style(styles);
  return gen.decode(merged, gen.compute_adain_params(style_code));
}

}  // namespace fewshot::variants
