#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>

#include "fewshot/data/detector.hpp"
#include "fewshot/data/manifest.hpp"

namespace fewshot::data {

struct ExpansionConfig {
  /// Detections are kept only when confidence is strictly greater than this.
  double confidence_threshold = 0.5;
  /// When set, expanded classes are filtered down to this list afterwards.
  std::optional<std::set<std::string>> keep_list;
  /// Keep the original whole-image records alongside the object crops.
  bool include_whole_images = false;
  /// Discard boxes whose snapped pixel width or height is below this.
  int min_box_side = 16;
  /// Skip images whose detector call throws instead of aborting the run.
  bool skip_on_detector_error = false;

  void validate() const;
};

/// Runs the detector over every record, writes one lossless crop per kept
/// detection under crop_dir/<class>/, and returns a manifest of the crops
/// labeled "<domain> - <object>" (plus the originals when
/// include_whole_images is set). Crop record paths are relative to
/// image_root when the crop directory lies under it. Deterministic for a
/// fixed (manifest, detector output, config).
DatasetManifest expand_dataset(const DatasetManifest& m, ObjectDetector& detector,
                               const ExpansionConfig& cfg,
                               const std::filesystem::path& image_root,
                               const std::filesystem::path& crop_dir);

/// "<domain> - <object>", both parts normalized.
std::string expanded_class_name(const std::string& domain, const std::string& object_label);

}  // namespace fewshot::data
