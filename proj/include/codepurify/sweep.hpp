#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "codepurify/pipeline.hpp"
#include "json.hpp"

namespace codepurify {

enum class SweepAxis { N, K, CleanSize, Rate, TokenizerMode, DatasetSize };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

struct SweepSpec {
  SweepAxis axis = SweepAxis::K;
  std::vector<std::string> values;  // rates accept "0.05" or "5%"
  PipelineConfig fixed;
  bool parallel_points = false;
};

struct SweepRow {
  std::string value;
  bool failed = false;
  std::string error;
  DetectionOutcome outcome;
  std::vector<std::string> selected;
};

/// Throws ConfigError when values are empty, unparsable, out of range for
/// their parameter, or not strictly increasing (distinct for modes).
void validate_sweep_spec(const SweepSpec& spec);

/// One pipeline run per value. A failing run produces a row marked failed and
/// the sweep continues.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Scenario& scenario);

/// Delimiter-separated table; wall times are left out so identical inputs
/// give identical tables.
std::string sweep_table(SweepAxis axis, const std::vector<SweepRow>& rows, char delimiter = ',');
nlohmann::ordered_json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace codepurify
