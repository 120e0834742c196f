#include "codepurify/sweep.hpp"

#include <charconv>
#include <future>
#include <iomanip>
#include <sstream>

#include "codepurify/error.hpp"

namespace codepurify {
namespace {

double parse_number(const std::string& text) {
  std::string body = text;
  double scale = 1.0;
  if (!body.empty() && body.back() == '%') {
    body.pop_back();
    scale = 0.01;
  }
  double v = 0.0;
  const auto* first = body.data();
  const auto* last = body.data() + body.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || body.empty()) throw ConfigError("not a number: " + text);
  return v * scale;
}

std::size_t parse_count(const std::string& text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ConfigError("not a non-negative integer: " + text);
  }
  return v;
}

Dataset head(const Dataset& d, std::size_t n, std::string_view what) {
  if (n > d.size()) {
    throw ConfigError(std::string(what) + " of " + std::to_string(n) + " exceeds the available " +
                      std::to_string(d.size()) + " samples");
  }
  Dataset out;
  out.provenance = d.provenance;
  out.samples.assign(d.samples.begin(), d.samples.begin() + static_cast<std::ptrdiff_t>(n));
  return out;
}

SweepRow run_point(const SweepSpec& spec, const Scenario& scenario, const std::string& value) {
  SweepRow row;
  row.value = value;
  try {
    PipelineConfig config = spec.fixed;
    Scenario point;
    const Scenario* use = &scenario;
    switch (spec.axis) {
      case SweepAxis::N: config.train.order = static_cast<int>(parse_count(value)); break;
      case SweepAxis::K: config.detector.k = parse_count(value); break;
      case SweepAxis::TokenizerMode: config.train.tokenizer_mode = parse_tokenizer_mode(value); break;
      case SweepAxis::CleanSize:
        point = scenario;
        point.clean = head(scenario.clean, parse_count(value), "clean size");
        use = &point;
        break;
      case SweepAxis::DatasetSize:
        point = scenario;
        point.base = head(scenario.base, parse_count(value), "dataset size");
        use = &point;
        break;
      case SweepAxis::Rate:
        point = scenario;
        point.attack.rate = parse_number(value);
        use = &point;
        break;
    }
    if (config.detector.max_seq_len < static_cast<std::size_t>(config.train.order)) {
      config.detector.max_seq_len = static_cast<std::size_t>(config.train.order);
    }
    auto result = run_scenario(*use, config);
    row.outcome = std::move(result.pipeline.outcome);
    row.selected = std::move(result.pipeline.report.selected);
  } catch (const std::exception& e) {
    row.failed = true;
    row.error = e.what();
  }
  return row;
}

}  // namespace

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::N: return "n";
    case SweepAxis::K: return "k";
    case SweepAxis::CleanSize: return "clean_size";
    case SweepAxis::Rate: return "rate";
    case SweepAxis::TokenizerMode: return "tokenizer_mode";
    case SweepAxis::DatasetSize: return "dataset_size";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  for (auto a : {SweepAxis::N, SweepAxis::K, SweepAxis::CleanSize, SweepAxis::Rate, SweepAxis::TokenizerMode,
                 SweepAxis::DatasetSize}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown sweep axis: " + std::string(name) +
                    " (expected n|k|clean_size|rate|tokenizer_mode|dataset_size)");
}

void validate_sweep_spec(const SweepSpec& spec) {
  if (spec.values.empty()) throw ConfigError("sweep needs at least one value");
  if (spec.axis == SweepAxis::TokenizerMode) {
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      parse_tokenizer_mode(spec.values[i]);
      for (std::size_t j = 0; j < i; ++j) {
        if (spec.values[i] == spec.values[j]) throw ConfigError("sweep values must be distinct");
      }
    }
    return;
  }
  double previous = 0.0;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    const auto& v = spec.values[i];
    double x = 0.0;
    switch (spec.axis) {
      case SweepAxis::N: {
        const auto n = parse_count(v);
        if (n < 1 || n > static_cast<std::size_t>(kMaxOrder)) throw ConfigError("sweep value n=" + v + " out of range");
        x = static_cast<double>(n);
        break;
      }
      case SweepAxis::Rate:
        x = parse_number(v);
        if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("sweep rate " + v + " outside [0, 1]");
        break;
      case SweepAxis::CleanSize:
      case SweepAxis::DatasetSize:
        x = static_cast<double>(parse_count(v));
        if (x < 1) throw ConfigError("sweep size " + v + " must be positive");
        break;
      default: x = static_cast<double>(parse_count(v)); break;
    }
    if (i > 0 && !(x > previous)) throw ConfigError("sweep values must be strictly increasing");
    previous = x;
  }
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Scenario& scenario) {
  validate_sweep_spec(spec);
  std::vector<SweepRow> rows;
  if (spec.parallel_points) {
    std::vector<std::future<SweepRow>> futures;
    for (const auto& v : spec.values) {
      futures.push_back(std::async(std::launch::async, [&spec, &scenario, v] { return run_point(spec, scenario, v); }));
    }
    for (auto& f : futures) rows.push_back(f.get());
  } else {
    for (const auto& v : spec.values) rows.push_back(run_point(spec, scenario, v));
  }
  return rows;
}

std::string sweep_table(SweepAxis axis, const std::vector<SweepRow>& rows, char delimiter) {
  std::ostringstream os;
  const char d = delimiter;
  os << to_string(axis) << d << "status" << d << "tp" << d << "fp" << d << "tn" << d << "fn" << d << "fpr" << d
     << "recall" << d << "precision" << d << "f1" << '\n';
  os << std::setprecision(6) << std::fixed;
  for (const auto& r : rows) {
    os << r.value << d;
    if (r.failed) {
      os << "failed" << d << d << d << d << d << d << d << d << '\n';
      continue;
    }
    const auto& o = r.outcome;
    os << "ok" << d << o.tp << d << o.fp << d << o.tn << d << o.fn << d << o.fpr << d << o.recall << d
       << o.precision << d << o.f1 << '\n';
  }
  return os.str();
}

nlohmann::ordered_json sweep_to_json(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["axis"] = std::string(to_string(spec.axis));
  doc["values"] = spec.values;
  doc["fixed"] = {{"n", spec.fixed.train.order},
                  {"k", spec.fixed.detector.k},
                  {"discount", spec.fixed.train.discount},
                  {"entropy_mode", std::string(to_string(spec.fixed.detector.entropy_mode))},
                  {"tokenizer_mode", std::string(to_string(spec.fixed.train.tokenizer_mode))}};
  auto& list = doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row = {{"value", r.value}, {"failed", r.failed}};
    if (r.failed) {
      row["error"] = r.error;
    } else {
      row["outcome"] = outcome_to_json(r.outcome, false);
      row["selected"] = r.selected;
    }
    list.push_back(std::move(row));
  }
  return doc;
}

}  // namespace codepurify
