#include "codepurify/report.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "codepurify/error.hpp"

namespace codepurify {

using ordered_json = nlohmann::ordered_json;

ordered_json report_to_json(const TriggerReport& report) {
  ordered_json doc = ordered_json::object();
  doc["config"] = {{"n", report.order},
                   {"k", report.k},
                   {"entropy_mode", std::string(to_string(report.entropy_mode))},
                   {"tokenizer_mode", std::string(to_string(report.tokenizer_mode))}};
  ordered_json entries = ordered_json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"token", e.token}, {"cumulative_delta", e.cumulative_delta}, {"support", e.support}});
  }
  doc["entries"] = std::move(entries);
  doc["selected"] = report.selected;
  doc["flagged_ids"] = report.flagged_ids;
  doc["warnings"] = report.warnings;
  return doc;
}

TriggerReport report_from_json(const ordered_json& doc) {
  TriggerReport report;
  try {
    const auto& config = doc.at("config");
    report.order = config.at("n").get<int>();
    report.k = config.at("k").get<std::size_t>();
    report.entropy_mode = parse_entropy_mode(config.at("entropy_mode").get<std::string>());
    report.tokenizer_mode = parse_tokenizer_mode(config.at("tokenizer_mode").get<std::string>());
    for (const auto& e : doc.at("entries")) {
      TriggerEntry entry;
      entry.token = e.at("token").get<std::string>();
      entry.cumulative_delta = e.at("cumulative_delta").get<double>();
      entry.cumulative_ticks = loss::to_ticks(entry.cumulative_delta);
      entry.support = e.at("support").get<std::size_t>();
      report.entries.push_back(std::move(entry));
    }
    report.selected = doc.at("selected").get<std::vector<std::string>>();
    report.flagged_ids = doc.at("flagged_ids").get<std::vector<std::string>>();
    if (doc.contains("warnings")) report.warnings = doc.at("warnings").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("malformed trigger report: ") + e.what());
  }
  return report;
}

void save_report(const TriggerReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write report file: " + path.string());
  out << report_to_json(report).dump(2) << '\n';
  out.flush();
  if (!out) throw DatasetError("I/O failure writing report file: " + path.string());
}

TriggerReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open report file: " + path.string());
  ordered_json doc;
  try {
    doc = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(path.string() + ": malformed trigger report: " + e.what());
  }
  return report_from_json(doc);
}

std::string format_report_table(const TriggerReport& report, std::size_t rows) {
  std::ostringstream os;
  os << std::left << std::setw(6) << "rank" << std::setw(24) << "token" << std::right << std::setw(18)
     << "cumulative_delta" << std::setw(9) << "support" << "  selected\n";
  const std::size_t shown = std::min(rows, report.entries.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const auto& e = report.entries[i];
    os << std::left << std::setw(6) << (i + 1) << std::setw(24) << e.token << std::right << std::setw(18)
       << std::fixed << std::setprecision(9) << e.cumulative_delta << std::setw(9) << e.support
       << (i < report.selected.size() ? "  *" : "") << '\n';
  }
  return os.str();
}

}  // namespace codepurify
