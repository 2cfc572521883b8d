#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace fewshot::data {

/// One catalog entry. Paths are relative to a data root chosen at use time;
/// class names are stored normalized (lowercase, single-space separated).
struct ImageRecord {
  std::string path;
  std::string class_name;
  int width = 0;
  int height = 0;

  bool operator==(const ImageRecord&) const = default;
};

/// Lowercase, trim, and collapse whitespace runs to single spaces. This is a
/// projection: normalizing twice changes nothing.
std::string normalize_class_name(const std::string& name);

/// Ordered collection of image records with a class index. Instances are
/// immutable values: curation operations return new manifests, so sharing
/// across threads is safe.
class DatasetManifest {
 public:
  /// Empty manifest (zero records, zero classes) — the explicit sentinel
  /// some operations return.
  DatasetManifest() = default;

  /// Validates invariants: unique paths, positive dimensions, non-empty
  /// class names. Record order is preserved; class names are normalized.
  DatasetManifest(std::vector<ImageRecord> records, std::uint64_t seed);

  const std::vector<ImageRecord>& records() const { return records_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// class name -> indices into records(), in record order.
  const std::map<std::string, std::vector<std::size_t>>& class_index() const {
    return class_index_;
  }
  std::set<std::string> class_names() const;
  std::size_t n_classes() const { return class_index_.size(); }
  bool has_class(const std::string& name) const;

 private:
  std::vector<ImageRecord> records_;
  std::map<std::string, std::vector<std::size_t>> class_index_;
  std::uint64_t seed_ = 0;
};

/// Reads a manifest file: one record per line, tab-separated
/// "path<TAB>class<TAB>width<TAB>height", UTF-8, '#' comment lines and blank
/// lines ignored. Errors carry the offending line number.
DatasetManifest load_manifest(const std::filesystem::path& path, std::uint64_t seed = 0);

/// Writes the same format back, byte-deterministically.
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);

/// Partitions records so train and test share no class. test_classes must be
/// known; splitting everything into test is an error. An empty test set
/// yields (m, empty sentinel).
std::pair<DatasetManifest, DatasetManifest> split_by_class(const DatasetManifest& m,
                                                           const std::set<std::string>& test_classes);

/// Caps every class at per_class records, keeping a seeded uniform sample
/// without replacement (in original record order). Classes at or below the
/// cap are untouched, which makes the operation idempotent.
DatasetManifest balance_classes(const DatasetManifest& m, std::size_t per_class);

/// Keeps only records whose class is in keep_list (names are normalized
/// before comparison). An empty result is an error.
DatasetManifest filter_classes(const DatasetManifest& m, const std::set<std::string>& keep_list);

std::map<std::string, std::size_t> class_counts(const DatasetManifest& m);

/// Keep-list file: one class name per line, '#' comments ignored.
std::set<std::string> load_keep_list(const std::filesystem::path& path);

}  // namespace fewshot::data
