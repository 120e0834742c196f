#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "codepurify/attacks.hpp"
#include "codepurify/dataset.hpp"
#include "json.hpp"

namespace codepurify {

struct StageTimes {
  double train_seconds = 0.0;
  double scan_seconds = 0.0;
  double purify_seconds = 0.0;

  double total() const { return train_seconds + scan_seconds + purify_seconds; }
};

/// Sample-level confusion counts and rates. Precision is 0 when nothing is
/// flagged, recall is 0 when nothing is poisoned, FPR is 0 when nothing is
/// clean, and F1 is 0 when precision + recall is 0.
struct DetectionOutcome {
  std::vector<std::string> flagged_ids;
  std::vector<std::string> truth_ids;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
  double fpr = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  StageTimes wall_time;
};

/// Throws DatasetError if a flagged or truth id is not in `dataset`.
DetectionOutcome score(const std::vector<std::string>& flagged, const std::vector<std::string>& truth,
                       const Dataset& dataset);

std::vector<std::string> truth_from_dataset(const Dataset& dataset);
std::vector<std::string> truth_from_records(const std::vector<PoisonRecord>& records);

nlohmann::ordered_json outcome_to_json(const DetectionOutcome& outcome, bool include_ids = true);

}  // namespace codepurify
