#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace fewshot::eval {

struct ClassMetrics {
  std::string class_name;
  double lpips_mean = 0.0;
  double is_value = 0.0;

  bool operator==(const ClassMetrics&) const = default;
};

/// Per-source-class metric rows plus their arithmetic means, with the
/// protocol parameters echoed for provenance.
struct MetricReport {
  std::vector<ClassMetrics> rows;  // sorted by class name
  double lpips_average = 0.0;
  double is_average = 0.0;
  int k_style = 0;
  int n_content_per_class = 0;
  int n_pairs = 0;
  std::uint64_t seed = 0;
  std::string model_id;

  bool operator==(const MetricReport&) const = default;
};

/// Recomputes the Average fields from the rows.
void compute_averages(MetricReport& report);

/// Writes the machine-readable JSON file and an aligned text table with one
/// row per source class plus an Average row (3 decimals, table style).
void write_report(const MetricReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path);

/// Reads the JSON form back; write_report followed by read_report
/// round-trips exactly.
MetricReport read_report(const std::filesystem::path& json_path);

std::string format_table(const MetricReport& report);

}  // namespace fewshot::eval
