#include "fewshot/data/manifest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/rng.hpp"

namespace fewshot::data {

std::string normalize_class_name(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  bool pending_space = false;
  for (unsigned char c : name) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

DatasetManifest::DatasetManifest(std::vector<ImageRecord> records, std::uint64_t seed)
    : records_(std::move(records)), seed_(seed) {
  std::unordered_set<std::string> seen_paths;
  seen_paths.reserve(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    ImageRecord& r = records_[i];
    r.class_name = normalize_class_name(r.class_name);
    if (r.class_name.empty()) {
      throw InputError("record " + std::to_string(i) + " (" + r.path + "): empty class name");
    }
    if (r.width <= 0 || r.height <= 0) {
      throw InputError("record " + std::to_string(i) + " (" + r.path +
                       "): width and height must be positive");
    }
    if (r.path.empty() || !seen_paths.insert(r.path).second) {
      throw InputError("duplicate or empty path in manifest: " + r.path);
    }
    class_index_[r.class_name].push_back(i);
  }
}

std::set<std::string> DatasetManifest::class_names() const {
  std::set<std::string> names;
  for (const auto& [name, _] : class_index_) names.insert(name);
  return names;
}

bool DatasetManifest::has_class(const std::string& name) const {
  return class_index_.count(normalize_class_name(name)) > 0;
}

DatasetManifest load_manifest(const std::filesystem::path& path, std::uint64_t seed) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open manifest: " + path.string());

  std::vector<ImageRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": expected 4 tab-separated fields, got " + std::to_string(fields.size()));
    }
    ImageRecord r;
    r.path = fields[0];
    r.class_name = fields[1];
    try {
      r.width = std::stoi(fields[2]);
      r.height = std::stoi(fields[3]);
    } catch (const std::exception&) {
      throw InputError(path.string() + ":" + std::to_string(line_no) +
                       ": width/height must be integers");
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw InputError(path.string() + ": no records");
  try {
    return DatasetManifest(std::move(records), seed);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest: " + path.string());
  for (const ImageRecord& r : m.records()) {
    os << r.path << '\t' << r.class_name << '\t' << r.width << '\t' << r.height << '\n';
  }
  if (!os) throw std::runtime_error("manifest write failed: " + path.string());
}

std::pair<DatasetManifest, DatasetManifest> split_by_class(
    const DatasetManifest& m, const std::set<std::string>& test_classes) {
  std::set<std::string> wanted;
  for (const std::string& name : test_classes) {
    const std::string norm = normalize_class_name(name);
    if (!m.has_class(norm)) throw InputError("split: unknown class '" + name + "'");
    wanted.insert(norm);
  }
  if (!m.empty() && wanted.size() == m.n_classes()) {
    throw InputError("split: every class assigned to test, train would be empty");
  }

  std::vector<ImageRecord> train, test;
  for (const ImageRecord& r : m.records()) {
    (wanted.count(r.class_name) ? test : train).push_back(r);
  }
  return {DatasetManifest(std::move(train), m.seed()),
          test.empty() ? DatasetManifest() : DatasetManifest(std::move(test), m.seed())};
}

DatasetManifest balance_classes(const DatasetManifest& m, std::size_t per_class) {
  if (per_class == 0) throw InputError("balance: per_class must be >= 1");

  std::vector<bool> keep(m.size(), true);
  for (const auto& [class_name, indices] : m.class_index()) {
    if (indices.size() <= per_class) continue;
    // Per-class stream seeded by (manifest seed, class name): the selection
    // for one class does not depend on which other classes exist.
    Rng rng(mix_seed(m.seed(), fnv1a(class_name)));
    std::vector<int> chosen =
        rng.sample_without_replacement(static_cast<int>(indices.size()), static_cast<int>(per_class));
    std::vector<bool> selected(indices.size(), false);
    for (int c : chosen) selected[c] = true;
    for (std::size_t i = 0; i < indices.size(); ++i) {
      if (!selected[i]) keep[indices[i]] = false;
    }
  }

  std::vector<ImageRecord> records;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (keep[i]) records.push_back(m.records()[i]);
  }
  return DatasetManifest(std::move(records), m.seed());
}

DatasetManifest filter_classes(const DatasetManifest& m, const std::set<std::string>& keep_list) {
  std::set<std::string> wanted;
  for (const std::string& name : keep_list) wanted.insert(normalize_class_name(name));

  std::vector<ImageRecord> records;
  for (const ImageRecord& r : m.records()) {
    if (wanted.count(r.class_name)) records.push_back(r);
  }
  if (records.empty()) throw InputError("filter: no records match the keep list");
  return DatasetManifest(std::move(records), m.seed());
}

std::map<std::string, std::size_t> class_counts(const DatasetManifest& m) {
  std::map<std::string, std::size_t> counts;
  for (const auto& [name, indices] : m.class_index()) counts[name] = indices.size();
  return counts;
}

std::set<std::string> load_keep_list(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open keep list: " + path.string());
  std::set<std::string> names;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string norm = normalize_class_name(line);
    if (norm.empty() || norm[0] == '#') continue;
    names.insert(norm);
  }
  if (names.empty()) throw InputError(path.string() + ": keep list is empty");
  return names;
}

}  // namespace fewshot::data
