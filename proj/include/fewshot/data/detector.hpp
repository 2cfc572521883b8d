#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fewshot/core/tensor.hpp"

namespace fewshot::data {

/// Axis-aligned object detection in pixel coordinates.
struct Detection {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  std::string label;
  double confidence = 0.0;
};

/// Throws std::invalid_argument unless 0 <= x_min < x_max <= width,
/// 0 <= y_min < y_max <= height and confidence is in [0, 1].
void validate_detection(const Detection& d, int width, int height);

/// Stable-sorts by descending confidence.
void sort_by_confidence(std::vector<Detection>& detections);

/// Pluggable single-shot detector. Implementations must return detections
/// sorted by descending confidence, with invariants valid for the given
/// image. The path-aware overload exists so file-keyed backends (the stub)
/// can serve fixtures; content-based detectors ignore the path.
class ObjectDetector {
 public:
  virtual ~ObjectDetector() = default;
  virtual std::vector<Detection> detect(const Tensor& image) = 0;
  virtual std::vector<Detection> detect(const std::string& path, const Tensor& image) {
    return detect(image);
  }
};

/// Deterministic detector backed by fixture boxes: a default list returned
/// for every image plus per-path lists. Output is validated against the
/// image and sorted by descending confidence regardless of fixture order.
class StubDetector : public ObjectDetector {
 public:
  StubDetector() = default;
  explicit StubDetector(std::vector<Detection> default_boxes)
      : default_boxes_(std::move(default_boxes)) {}

  void set_default(std::vector<Detection> boxes) { default_boxes_ = std::move(boxes); }
  void add(const std::string& path, std::vector<Detection> boxes) {
    by_path_[path] = std::move(boxes);
  }

  /// Fixture file: {"default": [...], "by_path": {"images/a.png": [...]}}
  /// where each detection is {"box": [x_min,y_min,x_max,y_max],
  /// "label": "car", "confidence": 0.9}.
  static StubDetector from_json_file(const std::filesystem::path& path);

  std::vector<Detection> detect(const Tensor& image) override;
  std::vector<Detection> detect(const std::string& path, const Tensor& image) override;

 private:
  std::vector<Detection> serve(const std::vector<Detection>& boxes, const Tensor& image) const;

  std::vector<Detection> default_boxes_;
  std::map<std::string, std::vector<Detection>> by_path_;
};

}  // namespace fewshot::data
