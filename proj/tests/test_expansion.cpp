#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/imageio.hpp"
#include "fewshot/data/expansion.hpp"
#include "fixtures.hpp"

using namespace fewshot;
using namespace fewshot::data;

namespace {

Tensor blank_image(int h = 32, int w = 32) {
  Tensor t({3, h, w});
  return t;
}

}  // namespace

TEST_CASE("stub detector echoes its fixtures sorted by confidence") {
  StubDetector det({{1, 1, 20, 20, "car", 0.4},
                    {2, 2, 24, 24, "person", 0.9},
                    {0, 0, 10, 10, "dog", 0.6}});
  const auto out = det.detect(blank_image());
  REQUIRE(out.size() == 3);
  CHECK(out[0].label == "person");
  CHECK(out[1].label == "dog");
  CHECK(out[2].label == "car");

  StubDetector empty_det;
  CHECK(empty_det.detect(blank_image()).empty());
}

TEST_CASE("stub detector validates box invariants against the image") {
  StubDetector det({{0, 0, 64, 64, "car", 0.9}});
  CHECK_THROWS_AS(det.detect(blank_image(32, 32)), std::invalid_argument);
  StubDetector bad_conf({{0, 0, 8, 8, "car", 1.5}});
  CHECK_THROWS_AS(bad_conf.detect(blank_image()), std::invalid_argument);
}

TEST_CASE("stub detector fixture file round-trip") {
  const auto dir = testutil::make_temp_dir("det-json");
  {
    std::ofstream os(dir / "boxes.json");
    os << R"({"default": [{"box": [1, 2, 9, 10], "label": "car", "confidence": 0.8}],
              "by_path": {"x.png": [{"box": [0, 0, 4, 4], "label": "dog", "confidence": 0.6}]}})";
  }
  StubDetector det = StubDetector::from_json_file(dir / "boxes.json");
  CHECK(det.detect(blank_image()).at(0).label == "car");
  CHECK(det.detect("x.png", blank_image()).at(0).label == "dog");
  CHECK(det.detect("other.png", blank_image()).at(0).label == "car");
  CHECK_THROWS_AS(StubDetector::from_json_file(dir / "nope.json"), InputError);
}

TEST_CASE("expanded class names follow the domain - object format") {
  CHECK(expanded_class_name("Sunny", "Car") == "sunny - car");
  CHECK(expanded_class_name("night", "traffic  light") == "night - traffic light");
}

TEST_CASE("expansion keeps strictly-above-threshold detections and names crops") {
  const auto dir = testutil::make_temp_dir("expand");
  testutil::write_test_image(dir / "img/sunny1.png", 64, 48, 5);
  DatasetManifest m({{"img/sunny1.png", "sunny", 64, 48}}, 3);

  StubDetector det;
  det.add("img/sunny1.png", {{2, 2, 34, 34, "car", 0.9},
                             {4, 4, 36, 36, "person", 0.5},    // exactly at threshold: dropped
                             {6, 6, 38, 38, "bench", 0.5001},  // just above: kept
                             {0, 0, 12, 12, "dog", 0.8}});     // 12px sides < min_box_side
  ExpansionConfig cfg;

  const DatasetManifest out = expand_dataset(m, det, cfg, dir, dir / "crops");
  const auto counts = class_counts(out);
  CHECK(counts.size() == 2);
  CHECK(counts.at("sunny - car") == 1);
  CHECK(counts.at("sunny - bench") == 1);
  CHECK_FALSE(out.has_class("sunny - person"));
  CHECK_FALSE(out.has_class("sunny - dog"));

  // Crop exists on disk, is loadable, and the record matches its size.
  for (const ImageRecord& r : out.records()) {
    const Tensor crop_img = load_image(dir / r.path);
    CHECK(crop_img.dim(2) == r.width);
    CHECK(crop_img.dim(1) == r.height);
    CHECK(r.width == 32);
  }
}

TEST_CASE("expansion respects include_whole_images and empty detections") {
  const auto dir = testutil::make_temp_dir("expand-whole");
  testutil::write_test_image(dir / "a.png", 64, 48, 6);
  DatasetManifest m({{"a.png", "rainy", 64, 48}}, 3);

  StubDetector det;  // no boxes anywhere
  ExpansionConfig cfg;
  CHECK(expand_dataset(m, det, cfg, dir, dir / "c1").empty());

  cfg.include_whole_images = true;
  const DatasetManifest out = expand_dataset(m, det, cfg, dir, dir / "c2");
  CHECK(out.records() == m.records());
}

TEST_CASE("raising the threshold never adds records") {
  const auto dir = testutil::make_temp_dir("expand-mono");
  testutil::write_test_image(dir / "a.png", 96, 64, 7);
  DatasetManifest m({{"a.png", "night", 96, 64}}, 3);

  StubDetector det;
  det.add("a.png", {{0, 0, 30, 30, "car", 0.55},
                    {10, 10, 50, 50, "bus", 0.75},
                    {20, 20, 60, 60, "person", 0.95}});

  std::vector<std::set<std::string>> kept_paths;
  int t_index = 0;
  for (const double t : {0.5, 0.7, 0.9, 0.99}) {
    ExpansionConfig cfg;
    cfg.confidence_threshold = t;
    cfg.include_whole_images = true;
    const DatasetManifest out =
        expand_dataset(m, det, cfg, dir, dir / ("crops" + std::to_string(t_index++)));
    std::set<std::string> paths;
    for (const ImageRecord& r : out.records()) {
      paths.insert(std::filesystem::path(r.path).filename().string());
    }
    kept_paths.push_back(std::move(paths));
  }
  for (std::size_t i = 1; i < kept_paths.size(); ++i) {
    for (const std::string& p : kept_paths[i]) CHECK(kept_paths[i - 1].count(p));
    CHECK(kept_paths[i].size() < kept_paths[i - 1].size());
  }
}

TEST_CASE("expansion output is byte-deterministic across reruns") {
  const auto dir = testutil::make_temp_dir("expand-det");
  testutil::ExpansionFixture fx = testutil::build_expansion_fixture(dir);

  ExpansionConfig cfg;
  auto run = [&](const std::string& tag) {
    const DatasetManifest out = expand_dataset(fx.manifest, fx.detector, cfg, dir, dir / tag);
    save_manifest(out, dir / (tag + ".tsv"));
    std::ifstream is(dir / (tag + ".tsv"));
    std::string bytes((std::istreambuf_iterator<char>(is)), {});
    // The manifests differ only in the crop directory name.
    std::string normalized;
    for (std::size_t i = 0; i < bytes.size();) {
      if (bytes.compare(i, tag.size(), tag) == 0) {
        normalized += "CROPDIR";
        i += tag.size();
      } else {
        normalized += bytes[i++];
      }
    }
    return normalized;
  };
  CHECK(run("run-a") == run("run-b"));
}

TEST_CASE("expansion plus the shipped keep list yields the curated 97 classes") {
  const auto dir = testutil::make_temp_dir("expand-keep");
  testutil::ExpansionFixture fx = testutil::build_expansion_fixture(dir);
  CHECK(fx.n_expanded_classes == 178);

  ExpansionConfig cfg;
  const DatasetManifest expanded = expand_dataset(fx.manifest, fx.detector, cfg, dir, dir / "crops");
  CHECK(expanded.n_classes() == 178);

  const DatasetManifest kept = filter_classes(expanded, load_keep_list(testutil::keep_list_path()));
  CHECK(kept.n_classes() == 97);

  std::map<std::string, int> per_domain;
  for (const std::string& name : kept.class_names()) {
    per_domain[name.substr(0, name.find(" - "))]++;
  }
  CHECK(per_domain.at("rainy") == 23);
  CHECK(per_domain.at("night") == 24);
  CHECK(per_domain.at("cloudy") == 25);
  CHECK(per_domain.at("sunny") == 25);
}

TEST_CASE("detector failures abort by default and can be skipped") {
  const auto dir = testutil::make_temp_dir("expand-fail");
  testutil::write_test_image(dir / "good.png", 64, 48, 8);
  DatasetManifest m({{"missing.png", "sunny", 64, 48}, {"good.png", "sunny", 64, 48}}, 3);

  StubDetector det;
  det.add("good.png", {{0, 0, 20, 20, "car", 0.9}});

  ExpansionConfig cfg;
  CHECK_THROWS_AS(expand_dataset(m, det, cfg, dir, dir / "c1"), InputError);

  cfg.skip_on_detector_error = true;
  const DatasetManifest out = expand_dataset(m, det, cfg, dir, dir / "c2");
  CHECK(out.size() == 1);
  CHECK(out.has_class("sunny - car"));
}
