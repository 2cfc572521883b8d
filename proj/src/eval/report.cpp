#include "fewshot/eval/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "fewshot/core/errors.hpp"

namespace fewshot::eval {

void compute_averages(MetricReport& report) {
  double lp = 0.0, is = 0.0;
  for (const ClassMetrics& row : report.rows) {
    lp += row.lpips_mean;
    is += row.is_value;
  }
  const double n = report.rows.empty() ? 1.0 : static_cast<double>(report.rows.size());
  report.lpips_average = lp / n;
  report.is_average = is / n;
}

std::string format_table(const MetricReport& report) {
  std::size_t name_width = std::string("Average").size();
  for (const ClassMetrics& row : report.rows) name_width = std::max(name_width, row.class_name.size());

  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << std::left << std::setw(static_cast<int>(name_width) + 2) << "source" << std::right
     << std::setw(8) << "LPIPS" << std::setw(8) << "IS" << "\n";
  for (const ClassMetrics& row : report.rows) {
    os << std::left << std::setw(static_cast<int>(name_width) + 2) << row.class_name << std::right
       << std::setw(8) << row.lpips_mean << std::setw(8) << row.is_value << "\n";
  }
  os << std::left << std::setw(static_cast<int>(name_width) + 2) << "Average" << std::right
     << std::setw(8) << report.lpips_average << std::setw(8) << report.is_average << "\n";
  return os.str();
}

void write_report(const MetricReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path) {
  nlohmann::json doc;
  doc["version"] = 1;
  doc["k_style"] = report.k_style;
  doc["n_content_per_class"] = report.n_content_per_class;
  doc["n_pairs"] = report.n_pairs;
  doc["seed"] = report.seed;
  doc["model_id"] = report.model_id;
  nlohmann::json rows = nlohmann::json::array();
  for (const ClassMetrics& row : report.rows) {
    rows.push_back({{"class", row.class_name}, {"lpips", row.lpips_mean}, {"is", row.is_value}});
  }
  doc["classes"] = rows;
  doc["average"] = {{"lpips", report.lpips_average}, {"is", report.is_average}};

  auto open = [](const std::filesystem::path& p) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write report: " + p.string());
    return os;
  };
  {
    std::ofstream os = open(json_path);
    os << doc.dump(2) << "\n";
  }
  {
    std::ofstream os = open(table_path);
    os << format_table(report);
  }
}

MetricReport read_report(const std::filesystem::path& json_path) {
  std::ifstream is(json_path);
  if (!is) throw InputError("cannot open report: " + json_path.string());
  nlohmann::json doc;
  try {
    is >> doc;
    MetricReport report;
    report.k_style = doc.at("k_style").get<int>();
    report.n_content_per_class = doc.at("n_content_per_class").get<int>();
    report.n_pairs = doc.at("n_pairs").get<int>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    report.model_id = doc.at("model_id").get<std::string>();
    for (const auto& row : doc.at("classes")) {
      report.rows.push_back({row.at("class").get<std::string>(), row.at("lpips").get<double>(),
                             row.at("is").get<double>()});
    }
    report.lpips_average = doc.at("average").at("lpips").get<double>();
    report.is_average = doc.at("average").at("is").get<double>();
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("malformed report " + json_path.string() + ": " + e.what());
  }
}

}  // namespace fewshot::eval
