#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "fewshot/core/errors.hpp"
#include "fewshot/data/manifest.hpp"
#include "helpers.hpp"

using namespace fewshot;
using namespace fewshot::data;

namespace {

// Synthetic manifest with the street-scene per-class cardinalities:
// cloudy 12723, sunny 10678, rainy 2226, night 6705.
DatasetManifest weather_manifest(std::uint64_t seed = 0) {
  const std::vector<std::pair<std::string, int>> counts = {
      {"cloudy", 12723}, {"sunny", 10678}, {"rainy", 2226}, {"night", 6705}};
  std::vector<ImageRecord> records;
  for (const auto& [cls, n] : counts) {
    for (int i = 0; i < n; ++i) {
      records.push_back({cls + "/" + std::to_string(i) + ".png", cls, 1920, 1280});
    }
  }
  return DatasetManifest(std::move(records), seed);
}

DatasetManifest tiny(const std::vector<std::pair<std::string, int>>& counts,
                     std::uint64_t seed = 0) {
  std::vector<ImageRecord> records;
  for (const auto& [cls, n] : counts) {
    for (int i = 0; i < n; ++i) {
      records.push_back({cls + std::to_string(i) + ".png", cls, 8, 8});
    }
  }
  return DatasetManifest(std::move(records), seed);
}

}  // namespace

TEST_CASE("class name normalization is a projection") {
  CHECK(normalize_class_name("  Sunny -  CAR ") == "sunny - car");
  CHECK(normalize_class_name("sunny - car") == "sunny - car");
  CHECK(normalize_class_name("a\tb") == "a b");
  for (const std::string s : {"Foo  Bar", " x ", "A - B - C", "night"}) {
    CHECK(normalize_class_name(normalize_class_name(s)) == normalize_class_name(s));
  }
}

TEST_CASE("load_manifest parses records in order") {
  const auto dir = testutil::make_temp_dir("manifest");
  {
    std::ofstream os(dir / "m.tsv");
    os << "# comment line\n";
    os << "a/1.png\ta\t64\t48\n";
    os << "a/2.png\tA\t64\t48\n";  // normalizes into the same class
    os << "\n";
    os << "b/1.png\tb\t32\t32\n";
    os << "b/2.png\tb\t32\t32\n";
  }
  const DatasetManifest m = load_manifest(dir / "m.tsv");
  CHECK(m.size() == 4);
  CHECK(m.n_classes() == 2);
  CHECK(m.records()[0].path == "a/1.png");
  CHECK(m.records()[3].path == "b/2.png");
  CHECK(class_counts(m).at("a") == 2);
}

TEST_CASE("load_manifest error paths") {
  const auto dir = testutil::make_temp_dir("manifest-err");
  CHECK_THROWS_AS(load_manifest(dir / "missing.tsv"), InputError);

  {
    std::ofstream os(dir / "empty.tsv");
    os << "# only comments\n";
  }
  CHECK_THROWS_WITH_AS(load_manifest(dir / "empty.tsv"),
                       doctest::Contains("no records"), InputError);

  {
    std::ofstream os(dir / "malformed.tsv");
    os << "a.png\ta\t64\t48\n";
    os << "b.png\tb\t64\n";
  }
  CHECK_THROWS_WITH_AS(load_manifest(dir / "malformed.tsv"), doctest::Contains(":2:"), InputError);

  {
    std::ofstream os(dir / "dup.tsv");
    os << "a.png\ta\t64\t48\n";
    os << "a.png\tb\t64\t48\n";
  }
  CHECK_THROWS_WITH_AS(load_manifest(dir / "dup.tsv"), doctest::Contains("duplicate"), InputError);

  {
    std::ofstream os(dir / "badsize.tsv");
    os << "a.png\ta\t0\t48\n";
  }
  CHECK_THROWS_AS(load_manifest(dir / "badsize.tsv"), InputError);
}

TEST_CASE("manifest save/load round-trips byte-identically") {
  const auto dir = testutil::make_temp_dir("manifest-rt");
  const DatasetManifest m = tiny({{"a", 3}, {"b", 2}});
  save_manifest(m, dir / "m.tsv");
  const DatasetManifest m2 = load_manifest(dir / "m.tsv");
  CHECK(m2.records() == m.records());
  save_manifest(m2, dir / "m2.tsv");
  std::ifstream f1(dir / "m.tsv"), f2(dir / "m2.tsv");
  const std::string s1((std::istreambuf_iterator<char>(f1)), {});
  const std::string s2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(s1 == s2);
}

TEST_CASE("weather-cardinality manifest has the expected class counts") {
  const DatasetManifest m = weather_manifest();
  const auto counts = class_counts(m);
  CHECK(counts.at("cloudy") == 12723);
  CHECK(counts.at("sunny") == 10678);
  CHECK(counts.at("rainy") == 2226);
  CHECK(counts.at("night") == 6705);
  std::size_t total = 0;
  for (const auto& [_, n] : counts) total += n;
  CHECK(total == m.size());
}

TEST_CASE("split by class partitions the weather manifest") {
  const DatasetManifest m = weather_manifest();
  const auto [train, test] = split_by_class(m, {"night"});
  CHECK(train.size() == 25627);  // 12723 + 10678 + 2226
  CHECK(test.size() == 6705);
  CHECK_FALSE(train.has_class("night"));
  CHECK(test.n_classes() == 1);
}

TEST_CASE("split with an empty test set returns the sentinel") {
  const DatasetManifest m = tiny({{"a", 2}, {"b", 3}});
  const auto [train, test] = split_by_class(m, {});
  CHECK(train.records() == m.records());
  CHECK(test.empty());
  CHECK(test.n_classes() == 0);
}

TEST_CASE("split errors: unknown class and empty train") {
  const DatasetManifest m = tiny({{"a", 2}, {"b", 3}});
  CHECK_THROWS_AS(split_by_class(m, {"c"}), InputError);
  CHECK_THROWS_AS(split_by_class(m, {"a", "b"}), InputError);
}

TEST_CASE("split on a synthetic two-class manifest") {
  const DatasetManifest m = tiny({{"a", 2}, {"b", 3}});
  const auto [train, test] = split_by_class(m, {"b"});
  CHECK(class_counts(train) == std::map<std::string, std::size_t>{{"a", 2}});
  CHECK(class_counts(test) == std::map<std::string, std::size_t>{{"b", 3}});
}

TEST_CASE("split partition property on random manifests") {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<std::string, int>> counts;
    const int n_classes = 2 + rng.uniform_int(5);
    for (int c = 0; c < n_classes; ++c) {
      counts.push_back({"c" + std::to_string(c), 1 + rng.uniform_int(6)});
    }
    const DatasetManifest m = tiny(counts, trial);

    std::set<std::string> test_classes;
    for (int c = 0; c < n_classes - 1; ++c) {
      if (rng.uniform_int(2) == 0) test_classes.insert("c" + std::to_string(c));
    }
    const auto [train, test] = split_by_class(m, test_classes);

    CHECK(train.size() + test.size() == m.size());
    std::set<std::string> train_cls = train.class_names(), test_cls = test.class_names();
    for (const auto& c : test_cls) CHECK_FALSE(train_cls.count(c));
    // Record multisets partition the original: path-disjoint union.
    std::set<std::string> paths;
    for (const auto& r : train.records()) paths.insert(r.path);
    for (const auto& r : test.records()) CHECK(paths.insert(r.path).second);
    CHECK(paths.size() == m.size());
  }
}

TEST_CASE("balancing the weather manifest to the smallest class") {
  const DatasetManifest m = weather_manifest(4242);
  const DatasetManifest balanced = balance_classes(m, 2226);
  for (const auto& [cls, n] : class_counts(balanced)) {
    CAPTURE(cls);
    CHECK(n == 2226);
  }
  // The smallest class is kept in full.
  const auto& rainy_before = m.class_index().at("rainy");
  const auto& rainy_after = balanced.class_index().at("rainy");
  CHECK(rainy_before.size() == rainy_after.size());
}

TEST_CASE("balance is idempotent and seed-deterministic") {
  const DatasetManifest m = tiny({{"a", 5}, {"b", 3}}, 17);
  const DatasetManifest b1 = balance_classes(m, 3);
  CHECK(class_counts(b1) == std::map<std::string, std::size_t>{{"a", 3}, {"b", 3}});
  CHECK(balance_classes(b1, 3).records() == b1.records());
  CHECK(balance_classes(m, 3).records() == b1.records());

  // A different seed may select differently, but determinism holds per seed.
  const DatasetManifest m2 = tiny({{"a", 5}, {"b", 3}}, 18);
  CHECK(balance_classes(m2, 3).records() == balance_classes(m2, 3).records());
}

TEST_CASE("balance leaves already-balanced manifests untouched") {
  const DatasetManifest m = tiny({{"a", 3}, {"b", 3}});
  CHECK(balance_classes(m, 3).records() == m.records());
  CHECK(balance_classes(m, 10).records() == m.records());
  CHECK_THROWS_AS(balance_classes(m, 0), InputError);
}

TEST_CASE("counts after balancing never exceed the cap") {
  const DatasetManifest m = tiny({{"a", 7}, {"b", 2}, {"c", 4}}, 5);
  for (const auto& [_, n] : class_counts(balance_classes(m, 3))) CHECK(n <= 3);
}

TEST_CASE("filter keeps exactly the requested classes") {
  const DatasetManifest m = tiny({{"a", 2}, {"b", 1}});
  const DatasetManifest f = filter_classes(m, {"a"});
  CHECK(class_counts(f) == std::map<std::string, std::size_t>{{"a", 2}});

  CHECK(filter_classes(m, {"a", "b"}).records() == m.records());
  CHECK_THROWS_AS(filter_classes(m, {"zzz"}), InputError);
}
