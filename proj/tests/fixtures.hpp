#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "fewshot/core/imageio.hpp"
#include "fewshot/core/rng.hpp"
#include "fewshot/data/detector.hpp"
#include "fewshot/data/expansion.hpp"
#include "fewshot/data/manifest.hpp"
#include "helpers.hpp"

namespace testutil {

inline std::filesystem::path repo_data_dir() {
#ifdef FSI2I_DATA_DIR
  return FSI2I_DATA_DIR;
#else
  return "data";
#endif
}

inline std::filesystem::path keep_list_path() { return repo_data_dir() / "keep_list.txt"; }

/// Writes a deterministic RGB test image (per-seed gradient pattern).
inline void write_test_image(const std::filesystem::path& path, int width, int height,
                             std::uint64_t seed) {
  fewshot::Rng rng(seed);
  const double r0 = rng.uniform(-0.8, 0.8), g0 = rng.uniform(-0.8, 0.8),
               b0 = rng.uniform(-0.8, 0.8);
  fewshot::Tensor img({3, height, width});
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double u = static_cast<double>(x) / width, v = static_cast<double>(y) / height;
      img.at(0, y, x) = std::clamp(r0 + 0.3 * u, -1.0, 1.0);
      img.at(1, y, x) = std::clamp(g0 + 0.3 * v, -1.0, 1.0);
      img.at(2, y, x) = std::clamp(b0 + 0.2 * (u - v), -1.0, 1.0);
    }
  }
  fewshot::save_image(path, img);
}

/// One image per weather domain plus stub detections that expand to exactly
/// 178 classes: the 97 curated ones (read from the shipped keep list, so the
/// fixture cannot drift from it) plus 81 noise pairs, along with boundary
/// cases (confidence exactly at threshold, below threshold, and a tiny box)
/// that a correct pipeline must drop.
struct ExpansionFixture {
  std::filesystem::path root;
  std::filesystem::path manifest_path;
  std::filesystem::path detections_path;
  fewshot::data::DatasetManifest manifest;
  fewshot::data::StubDetector detector;
  std::map<std::string, std::vector<std::string>> kept_objects_by_domain;
  int n_expanded_classes = 0;
};

inline ExpansionFixture build_expansion_fixture(const std::filesystem::path& dir) {
  namespace fd = fewshot::data;
  ExpansionFixture fx;
  fx.root = dir;

  // Group the shipped keep list as domain -> object labels.
  for (const std::string& entry : fd::load_keep_list(keep_list_path())) {
    const auto sep = entry.find(" - ");
    fx.kept_objects_by_domain[entry.substr(0, sep)].push_back(entry.substr(sep + 3));
  }

  const std::vector<std::string> noise_labels = {
      "giraffe", "zebra",    "elephant", "kite", "frisbee",  "surfboard", "banana",
      "apple",   "sandwich", "orange",   "broccoli", "carrot", "pizza",   "donut",
      "cake",    "couch",    "bed",      "toaster",  "sink",   "refrigerator", "book"};
  const std::map<std::string, int> noise_per_domain = {
      {"cloudy", 20}, {"night", 21}, {"rainy", 20}, {"sunny", 20}};

  const int width = 96, height = 64;
  std::vector<fd::ImageRecord> records;
  nlohmann::json by_path = nlohmann::json::object();
  std::uint64_t img_seed = 101;
  for (const auto& [domain, objects] : fx.kept_objects_by_domain) {
    const std::string rel = "images/" + domain + ".png";
    write_test_image(dir / rel, width, height, img_seed++);
    records.push_back({rel, domain, width, height});

    std::vector<fd::Detection> boxes;
    for (const std::string& label : objects) {
      boxes.push_back({8.0, 8.0, 40.0, 40.0, label, 0.9});
    }
    for (int i = 0; i < noise_per_domain.at(domain); ++i) {
      boxes.push_back({12.0, 12.0, 44.0, 44.0, noise_labels[i], 0.7});
    }
    // Must all be dropped: at the threshold, below it, and a sliver box.
    boxes.push_back({8.0, 8.0, 40.0, 40.0, "edge case", 0.5});
    boxes.push_back({8.0, 8.0, 40.0, 40.0, "low confidence", 0.3});
    boxes.push_back({0.0, 0.0, 8.0, 8.0, "tiny", 0.95});

    nlohmann::json arr = nlohmann::json::array();
    for (const fd::Detection& d : boxes) {
      arr.push_back({{"box", {d.x_min, d.y_min, d.x_max, d.y_max}},
                     {"label", d.label},
                     {"confidence", d.confidence}});
    }
    by_path[rel] = std::move(arr);
    fx.detector.add(rel, std::move(boxes));
    fx.n_expanded_classes += static_cast<int>(objects.size()) + noise_per_domain.at(domain);
  }
  fx.manifest = fd::DatasetManifest(std::move(records), 7);
  fx.manifest_path = dir / "manifest.tsv";
  fd::save_manifest(fx.manifest, fx.manifest_path);
  fx.detections_path = dir / "detections.json";
  {
    std::ofstream os(fx.detections_path);
    os << nlohmann::json{{"by_path", by_path}}.dump(1) << "\n";
  }
  return fx;
}

}  // namespace testutil
