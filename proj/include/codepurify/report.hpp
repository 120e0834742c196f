#pragma once

#include <filesystem>
#include <string>

#include "codepurify/detector.hpp"
#include "json.hpp"

namespace codepurify {

// Report document:
//   { "config":   { "n", "k", "entropy_mode", "tokenizer_mode" },
//     "entries":  [ { "token", "cumulative_delta", "support" } ],
//     "selected": [ token ],
//     "flagged_ids": [ id ],
//     "warnings": [ text ] }
nlohmann::ordered_json report_to_json(const TriggerReport& report);
TriggerReport report_from_json(const nlohmann::ordered_json& doc);

void save_report(const TriggerReport& report, const std::filesystem::path& path);
TriggerReport load_report(const std::filesystem::path& path);

/// Fixed-width console rendering of the first `rows` entries.
std::string format_report_table(const TriggerReport& report, std::size_t rows);

}  // namespace codepurify
