#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace codepurify {

/// One dataset record. Fields other than id/code/label/poisoned are kept in
/// `extra` verbatim so task payloads survive a load/save cycle.
struct CodeSample {
  std::string id;
  std::string code;
  std::optional<std::string> label;
  std::optional<bool> poisoned;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();

  friend bool operator==(const CodeSample&, const CodeSample&) = default;
};

struct Dataset {
  std::vector<CodeSample> samples;
  std::string provenance;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  // Provenance is free text and is not persisted in the record file.
  friend bool operator==(const Dataset& a, const Dataset& b) { return a.samples == b.samples; }
};

struct LoadOptions {
  // Strict mode rejects records without an id. Lenient mode assigns
  // "line-<n>" and reports every assignment through `LoadResult::warnings`.
  bool strict = true;
};

struct LoadResult {
  Dataset dataset;
  std::vector<std::string> warnings;
};

LoadResult load_dataset_with_warnings(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options = {});

/// Parses line-delimited JSON text; `origin` only decorates error messages.
LoadResult parse_dataset(std::string_view text, const LoadOptions& options = {}, std::string_view origin = "<memory>");

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);
std::string serialize_dataset(const Dataset& dataset);

/// Throws DatasetError on duplicate ids or blank code.
void validate_dataset(const Dataset& dataset);

}  // namespace codepurify
