#include "fewshot/data/expansion.hpp"

#include <cctype>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/image_ops.hpp"
#include "fewshot/core/imageio.hpp"
#include "fewshot/core/log.hpp"

namespace fewshot::data {

namespace {

// Filesystem-safe token: lowercase alphanumerics, runs of anything else
// become single dashes.
std::string slug(const std::string& s) {
  std::string out;
  bool pending_dash = false;
  for (unsigned char c : s) {
    if (std::isalnum(c)) {
      if (pending_dash && !out.empty()) out.push_back('-');
      pending_dash = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      pending_dash = true;
    }
  }
  return out;
}

std::string relative_or_absolute(const std::filesystem::path& p,
                                 const std::filesystem::path& root) {
  const auto rel = std::filesystem::weakly_canonical(p).lexically_relative(
      std::filesystem::weakly_canonical(root));
  if (rel.empty() || rel.native().starts_with("..")) {
    return std::filesystem::weakly_canonical(p).generic_string();
  }
  return rel.generic_string();
}

}  // namespace

void ExpansionConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw InputError("expansion: confidence_threshold must lie in [0, 1]");
  }
  if (min_box_side < 1) throw InputError("expansion: min_box_side must be >= 1");
}

std::string expanded_class_name(const std::string& domain, const std::string& object_label) {
  return normalize_class_name(domain) + " - " + normalize_class_name(object_label);
}

DatasetManifest expand_dataset(const DatasetManifest& m, ObjectDetector& detector,
                               const ExpansionConfig& cfg,
                               const std::filesystem::path& image_root,
                               const std::filesystem::path& crop_dir) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(crop_dir, ec);
  if (ec || !std::filesystem::is_directory(crop_dir)) {
    throw InputError("expansion: cannot create crop directory " + crop_dir.string());
  }

  std::vector<ImageRecord> out;
  for (const ImageRecord& record : m.records()) {
    const std::filesystem::path image_path = image_root / record.path;
    Tensor image;
    std::vector<Detection> detections;
    try {
      image = load_image(image_path);
      detections = detector.detect(record.path, image);
    } catch (const std::exception& e) {
      if (cfg.skip_on_detector_error) {
        log::warn("expansion: skipping " + record.path + ": " + e.what());
        continue;
      }
      throw;
    }

    if (cfg.include_whole_images) out.push_back(record);

    const int width = image.dim(2);
    const int height = image.dim(1);
    for (const Detection& det : detections) {
      validate_detection(det, width, height);
      // "more than 50% of confidence": strictly greater than the threshold.
      if (!(det.confidence > cfg.confidence_threshold)) continue;
      const PixelBox box = snap_box(det.x_min, det.y_min, det.x_max, det.y_max, width, height);
      if (box.width() < cfg.min_box_side || box.height() < cfg.min_box_side) continue;

      const std::string class_name = expanded_class_name(record.class_name, det.label);
      const std::string file_name = slug(std::filesystem::path(record.path).replace_extension("").string()) +
                                    "_" + std::to_string(box.x0) + "_" + std::to_string(box.y0) +
                                    "_" + std::to_string(box.x1) + "_" + std::to_string(box.y1) +
                                    "_" + slug(det.label) + ".png";
      const std::filesystem::path crop_path = crop_dir / class_name / file_name;
      save_image(crop_path, crop(image, box));

      ImageRecord r;
      r.path = relative_or_absolute(crop_path, image_root);
      r.class_name = class_name;
      r.width = box.width();
      r.height = box.height();
      out.push_back(std::move(r));
    }
  }

  DatasetManifest expanded(std::move(out), m.seed());
  if (cfg.keep_list) return filter_classes(expanded, *cfg.keep_list);
  return expanded;
}

}  // namespace fewshot::data
