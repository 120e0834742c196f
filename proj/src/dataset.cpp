#include "codepurify/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "codepurify/error.hpp"

namespace codepurify {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\f' && c != '\v') return false;
  }
  return true;
}

std::string where(std::string_view origin, std::size_t line) {
  std::ostringstream os;
  os << origin << ":" << line;
  return os.str();
}

CodeSample parse_record(const std::string& line, std::size_t line_no, std::string_view origin,
                        const LoadOptions& options, std::vector<std::string>& warnings) {
  ordered_json record;
  try {
    record = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError("malformed record at " + where(origin, line_no) + ": " + e.what());
  }
  if (!record.is_object()) {
    throw DatasetError("malformed record at " + where(origin, line_no) + ": expected a JSON object");
  }

  CodeSample sample;
  if (auto it = record.find("id"); it != record.end()) {
    if (!it->is_string()) throw DatasetError("record at " + where(origin, line_no) + ": \"id\" must be a string");
    sample.id = it->get<std::string>();
  } else if (options.strict) {
    throw DatasetError("record at " + where(origin, line_no) + " has no \"id\" (strict mode)");
  } else {
    sample.id = "line-" + std::to_string(line_no);
    warnings.push_back("assigned id " + sample.id + " to record at " + where(origin, line_no));
  }

  auto code = record.find("code");
  if (code == record.end() || !code->is_string()) {
    throw DatasetError("record " + sample.id + " at " + where(origin, line_no) + ": \"code\" must be a string");
  }
  sample.code = code->get<std::string>();
  if (is_blank(sample.code)) {
    throw DatasetError("record " + sample.id + " at " + where(origin, line_no) + " has empty code");
  }

  if (auto it = record.find("label"); it != record.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw DatasetError("record " + sample.id + " at " + where(origin, line_no) + ": \"label\" must be a string");
    }
    sample.label = it->get<std::string>();
  }
  if (auto it = record.find("poisoned"); it != record.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw DatasetError("record " + sample.id + " at " + where(origin, line_no) + ": \"poisoned\" must be a boolean");
    }
    sample.poisoned = it->get<bool>();
  }

  for (auto it = record.begin(); it != record.end(); ++it) {
    const auto& key = it.key();
    if (key == "id" || key == "code" || key == "label" || key == "poisoned") continue;
    sample.extra[key] = it.value();
  }
  return sample;
}

}  // namespace

void validate_dataset(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(dataset.samples.size());
  for (const auto& s : dataset.samples) {
    if (is_blank(s.code)) throw DatasetError("record " + s.id + " has empty code");
    if (!seen.insert(s.id).second) throw DatasetError("duplicate id: " + s.id);
  }
}

LoadResult parse_dataset(std::string_view text, const LoadOptions& options, std::string_view origin) {
  LoadResult result;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    CodeSample sample = parse_record(line, line_no, origin, options, result.warnings);
    if (!seen.insert(sample.id).second) {
      throw DatasetError("duplicate id " + sample.id + " at " + where(origin, line_no));
    }
    result.dataset.samples.push_back(std::move(sample));
  }
  result.dataset.provenance = std::string(origin);
  return result;
}

LoadResult load_dataset_with_warnings(const std::filesystem::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open dataset file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_dataset(buffer.str(), options, path.string());
}

Dataset load_dataset(const std::filesystem::path& path, const LoadOptions& options) {
  return load_dataset_with_warnings(path, options).dataset;
}

std::string serialize_dataset(const Dataset& dataset) {
  std::string out;
  for (const auto& s : dataset.samples) {
    ordered_json record = ordered_json::object();
    record["id"] = s.id;
    record["code"] = s.code;
    if (s.label) record["label"] = *s.label;
    if (s.poisoned) record["poisoned"] = *s.poisoned;
    for (auto it = s.extra.begin(); it != s.extra.end(); ++it) record[it.key()] = it.value();
    try {
      out += record.dump(-1, ' ', false, nlohmann::json::error_handler_t::strict);
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError("cannot serialize record " + s.id + ": " + e.what());
    }
    out += '\n';
  }
  return out;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  const std::string text = serialize_dataset(dataset);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write dataset file: " + path.string());
  out << text;
  out.flush();
  if (!out) throw DatasetError("I/O failure writing dataset file: " + path.string());
}

}  // namespace codepurify
