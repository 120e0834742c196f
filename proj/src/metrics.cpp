#include "codepurify/metrics.hpp"

#include <unordered_set>

#include "codepurify/error.hpp"

namespace codepurify {

DetectionOutcome score(const std::vector<std::string>& flagged, const std::vector<std::string>& truth,
                       const Dataset& dataset) {
  std::unordered_set<std::string> ids;
  ids.reserve(dataset.size());
  for (const auto& s : dataset.samples) ids.insert(s.id);

  const std::unordered_set<std::string> flagged_set(flagged.begin(), flagged.end());
  const std::unordered_set<std::string> truth_set(truth.begin(), truth.end());
  for (const auto& id : flagged_set) {
    if (!ids.contains(id)) throw DatasetError("flagged id not in dataset: " + id);
  }
  for (const auto& id : truth_set) {
    if (!ids.contains(id)) throw DatasetError("ground-truth id not in dataset: " + id);
  }

  DetectionOutcome out;
  for (const auto& s : dataset.samples) {
    const bool f = flagged_set.contains(s.id);
    const bool t = truth_set.contains(s.id);
    if (f) out.flagged_ids.push_back(s.id);
    if (t) out.truth_ids.push_back(s.id);
    if (f && t) ++out.tp;
    if (f && !t) ++out.fp;
    if (!f && t) ++out.fn;
    if (!f && !t) ++out.tn;
  }
  auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  out.recall = ratio(out.tp, out.tp + out.fn);
  out.fpr = ratio(out.fp, out.fp + out.tn);
  out.precision = ratio(out.tp, out.tp + out.fp);
  out.f1 = out.precision + out.recall == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / (out.precision + out.recall);
  return out;
}

std::vector<std::string> truth_from_dataset(const Dataset& dataset) {
  std::vector<std::string> ids;
  for (const auto& s : dataset.samples) {
    if (s.poisoned.value_or(false)) ids.push_back(s.id);
  }
  return ids;
}

std::vector<std::string> truth_from_records(const std::vector<PoisonRecord>& records) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(r.sample_id);
  return ids;
}

nlohmann::ordered_json outcome_to_json(const DetectionOutcome& outcome, bool include_ids) {
  nlohmann::ordered_json doc = {{"tp", outcome.tp},         {"fp", outcome.fp},
                                {"tn", outcome.tn},         {"fn", outcome.fn},
                                {"fpr", outcome.fpr},       {"recall", outcome.recall},
                                {"precision", outcome.precision}, {"f1", outcome.f1}};
  doc["wall_time"] = {{"train", outcome.wall_time.train_seconds},
                      {"scan", outcome.wall_time.scan_seconds},
                      {"purify", outcome.wall_time.purify_seconds},
                      {"total", outcome.wall_time.total()}};
  if (include_ids) {
    doc["flagged_ids"] = outcome.flagged_ids;
    doc["truth_ids"] = outcome.truth_ids;
  }
  return doc;
}

}  // namespace codepurify
