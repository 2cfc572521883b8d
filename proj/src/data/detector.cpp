#include "fewshot/data/detector.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "fewshot/core/errors.hpp"

namespace fewshot::data {

void validate_detection(const Detection& d, int width, int height) {
  if (!(d.x_min >= 0.0 && d.x_min < d.x_max && d.x_max <= width)) {
    throw std::invalid_argument("detection x range [" + std::to_string(d.x_min) + ", " +
                                std::to_string(d.x_max) + ") invalid for width " +
                                std::to_string(width));
  }
  if (!(d.y_min >= 0.0 && d.y_min < d.y_max && d.y_max <= height)) {
    throw std::invalid_argument("detection y range [" + std::to_string(d.y_min) + ", " +
                                std::to_string(d.y_max) + ") invalid for height " +
                                std::to_string(height));
  }
  if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
    throw std::invalid_argument("detection confidence must lie in [0, 1]");
  }
}

void sort_by_confidence(std::vector<Detection>& detections) {
  std::stable_sort(detections.begin(), detections.end(),
                   [](const Detection& a, const Detection& b) { return a.confidence > b.confidence; });
}

std::vector<Detection> StubDetector::serve(const std::vector<Detection>& boxes,
                                           const Tensor& image) const {
  if (image.ndim() != 3) throw std::invalid_argument("detector expects a (C,H,W) image");
  std::vector<Detection> out = boxes;
  for (const Detection& d : out) validate_detection(d, image.dim(2), image.dim(1));
  sort_by_confidence(out);
  return out;
}

std::vector<Detection> StubDetector::detect(const Tensor& image) {
  return serve(default_boxes_, image);
}

std::vector<Detection> StubDetector::detect(const std::string& path, const Tensor& image) {
  const auto it = by_path_.find(path);
  return serve(it != by_path_.end() ? it->second : default_boxes_, image);
}

StubDetector StubDetector::from_json_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open detection fixtures: " + path.string());
  nlohmann::json doc;
  try {
    is >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed detection fixtures " + path.string() + ": " + e.what());
  }

  auto parse_boxes = [&](const nlohmann::json& arr) {
    std::vector<Detection> boxes;
    for (const auto& item : arr) {
      Detection d;
      const auto& box = item.at("box");
      if (!box.is_array() || box.size() != 4) {
        throw InputError("detection fixture box must be [x_min,y_min,x_max,y_max]");
      }
      d.x_min = box[0].get<double>();
      d.y_min = box[1].get<double>();
      d.x_max = box[2].get<double>();
      d.y_max = box[3].get<double>();
      d.label = item.at("label").get<std::string>();
      d.confidence = item.at("confidence").get<double>();
      boxes.push_back(std::move(d));
    }
    return boxes;
  };

  StubDetector det;
  try {
    if (doc.contains("default")) det.set_default(parse_boxes(doc["default"]));
    if (doc.contains("by_path")) {
      for (const auto& [key, boxes] : doc["by_path"].items()) det.add(key, parse_boxes(boxes));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed detection fixtures " + path.string() + ": " + e.what());
  }
  return det;
}

}  // namespace fewshot::data
