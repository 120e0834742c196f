#include "codepurify/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "codepurify/error.hpp"
#include "codepurify/lexical.hpp"

namespace codepurify {
namespace {

constexpr std::uint64_t kSelectionSalt = 0;
constexpr std::uint64_t kRenameSalt = 0x72656e616d65ULL;

std::vector<std::string> unique_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto& t : Tokenizer(TokenizerMode::Fine).tokenize(text).tokens) {
    if (std::find(out.begin(), out.end(), t.text) == out.end()) out.push_back(std::move(t.text));
  }
  return out;
}

}  // namespace

std::string_view to_string(AttackStrategy strategy) {
  switch (strategy) {
    case AttackStrategy::BadCodeFixed: return "badcode-fixed";
    case AttackStrategy::BadCodeMixed: return "badcode-mixed";
    case AttackStrategy::BncFixed: return "bnc-fixed";
    case AttackStrategy::BncGrammar: return "bnc-grammar";
    case AttackStrategy::CodePoisonerVariable: return "codepoisoner-variable";
  }
  return "unknown";
}

AttackStrategy parse_attack_strategy(std::string_view name) {
  for (auto s : {AttackStrategy::BadCodeFixed, AttackStrategy::BadCodeMixed, AttackStrategy::BncFixed,
                 AttackStrategy::BncGrammar, AttackStrategy::CodePoisonerVariable}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown attack strategy: " + std::string(name) +
                    " (expected badcode-fixed|badcode-mixed|bnc-fixed|bnc-grammar|codepoisoner-variable)");
}

std::size_t poison_count(double rate, std::size_t n) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw ConfigError("poisoning rate must be in [0, 1]");
  const auto count = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  if (rate > 0.0 && count == 0) {
    std::ostringstream os;
    os << "poisoning rate " << rate << " of " << n << " samples rounds to zero poisoned samples";
    throw ConfigError(os.str());
  }
  return count;
}

std::string rename_trigger_name(const AttackConfig& config) {
  if (!config.rename_trigger.empty()) return config.rename_trigger;
  Rng rng(mix_seed(config.seed, kRenameSalt));
  std::string name = config.rename_prefix;
  for (int i = 0; i < 2; ++i) name += static_cast<char>('a' + rng.below(26));
  return name;
}

std::optional<Mutation> append_trigger(std::string_view code, std::string_view trigger, Rng& rng) {
  auto candidates = lexical::function_names(code);
  if (candidates.empty()) candidates = lexical::variable_names(code);
  if (candidates.empty()) return std::nullopt;
  const std::string target = rng.pick(candidates);
  const std::string renamed = target + std::string(trigger);
  auto mutated = lexical::rename(code, target, renamed);
  if (!mutated) return std::nullopt;

  Mutation m;
  const auto sites = lexical::occurrences(*mutated, renamed);
  m.code = std::move(*mutated);
  m.injected_tokens = {std::string(trigger)};
  m.injection_site = Span{sites.front().begin + target.size(), sites.front().end};
  return m;
}

std::optional<Mutation> insert_dead_code(std::string_view code, std::string_view statement, Rng& rng) {
  const auto cuts = lexical::statement_boundaries(code);
  if (cuts.empty()) return std::nullopt;
  const std::size_t at = rng.pick(cuts);

  // Indent like the line that follows the insertion point.
  std::string indent;
  std::size_t next_line = code.find('\n', at);
  if (next_line != std::string_view::npos) {
    for (std::size_t i = next_line + 1; i < code.size() && (code[i] == ' ' || code[i] == '\t'); ++i) indent += code[i];
  }
  const bool at_line_start = at > 0 && code[at - 1] == '\n';
  const std::string prefix = at_line_start ? indent : "\n" + indent;
  const std::string suffix = at_line_start ? "\n" : "";

  Mutation m;
  m.code.reserve(code.size() + statement.size() + prefix.size() + 1);
  m.code.append(code.substr(0, at)).append(prefix).append(statement).append(suffix).append(code.substr(at));
  m.injected_tokens = unique_tokens(statement);
  m.injection_site = Span{at + prefix.size(), at + prefix.size() + statement.size()};
  return m;
}

std::optional<Mutation> rename_identifier(std::string_view code, std::string_view new_name, Rng& rng) {
  std::vector<std::string> candidates = lexical::variable_names(code);
  std::erase(candidates, std::string(new_name));
  if (candidates.empty() || !lexical::occurrences(code, new_name).empty()) return std::nullopt;
  const std::string target = rng.pick(candidates);
  auto mutated = lexical::rename(code, target, new_name);
  if (!mutated) return std::nullopt;

  Mutation m;
  const auto sites = lexical::occurrences(*mutated, new_name);
  m.code = std::move(*mutated);
  m.injected_tokens = unique_tokens(new_name);
  m.injection_site = sites.front();
  return m;
}

PoisonResult poison(const Dataset& clean, const AttackConfig& config) {
  const std::size_t n = clean.size();
  const std::size_t target = poison_count(config.rate, n);
  if (config.strategy == AttackStrategy::BadCodeFixed && config.fixed_token.empty()) {
    throw ConfigError("badcode-fixed needs a non-empty trigger token");
  }
  if (config.strategy == AttackStrategy::BadCodeMixed && config.token_pool.empty()) {
    throw ConfigError("badcode-mixed needs a non-empty trigger pool");
  }
  if (config.strategy == AttackStrategy::BncGrammar) validate_grammar(config.grammar);
  const std::string rename_to = rename_trigger_name(config);

  PoisonResult result;
  result.poisoned = clean;
  result.poisoned.provenance = clean.provenance + " | attack=" + std::string(to_string(config.strategy)) +
                               " rate=" + std::to_string(config.rate) + " seed=" + std::to_string(config.seed);
  for (auto& s : result.poisoned.samples) s.poisoned = false;
  if (target == 0) return result;

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng selector(mix_seed(config.seed, kSelectionSalt));
  selector.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> chosen;
  std::vector<Mutation> mutations;
  for (std::size_t i : order) {
    if (chosen.size() == target) break;
    const auto& sample = clean.samples[i];
    Rng rng(mix_seed(config.seed, i + 1));
    std::optional<Mutation> m;
    switch (config.strategy) {
      case AttackStrategy::BadCodeFixed: m = append_trigger(sample.code, config.fixed_token, rng); break;
      case AttackStrategy::BadCodeMixed: {
        const std::string trigger = rng.pick(config.token_pool);
        m = append_trigger(sample.code, trigger, rng);
        break;
      }
      case AttackStrategy::BncFixed: m = insert_dead_code(sample.code, config.dead_code, rng); break;
      case AttackStrategy::BncGrammar: {
        const std::string statement = generate(config.grammar, rng);
        m = insert_dead_code(sample.code, statement, rng);
        break;
      }
      case AttackStrategy::CodePoisonerVariable: m = rename_identifier(sample.code, rename_to, rng); break;
    }
    if (!m) {
      result.warnings.push_back("sample " + sample.id + " has no injection site for " +
                                std::string(to_string(config.strategy)) + "; skipped");
      continue;
    }
    chosen.push_back(i);
    mutations.push_back(std::move(*m));
  }
  if (chosen.size() < target) {
    throw AttackError("only " + std::to_string(chosen.size()) + " of the requested " + std::to_string(target) +
                      " samples are eligible for " + std::string(to_string(config.strategy)) + " (short by " +
                      std::to_string(target - chosen.size()) + ")");
  }

  std::vector<std::size_t> by_position(chosen.size());
  for (std::size_t j = 0; j < by_position.size(); ++j) by_position[j] = j;
  std::sort(by_position.begin(), by_position.end(), [&](auto a, auto b) { return chosen[a] < chosen[b]; });
  for (std::size_t j : by_position) {
    auto& sample = result.poisoned.samples[chosen[j]];
    auto& m = mutations[j];
    sample.code = std::move(m.code);
    sample.poisoned = true;
    if (config.target_label) sample.label = *config.target_label;
    result.records.push_back(PoisonRecord{sample.id, config.strategy, std::move(m.injected_tokens), m.injection_site});
  }
  return result;
}

nlohmann::ordered_json record_to_json(const PoisonRecord& record) {
  return {{"sample_id", record.sample_id},
          {"strategy", std::string(to_string(record.strategy))},
          {"injected_tokens", record.injected_tokens},
          {"injection_site", {record.injection_site.begin, record.injection_site.end}}};
}

PoisonRecord record_from_json(const nlohmann::ordered_json& doc) {
  try {
    PoisonRecord record;
    record.sample_id = doc.at("sample_id").get<std::string>();
    record.strategy = parse_attack_strategy(doc.at("strategy").get<std::string>());
    record.injected_tokens = doc.at("injected_tokens").get<std::vector<std::string>>();
    record.injection_site = Span{doc.at("injection_site").at(0).get<std::size_t>(),
                                 doc.at("injection_site").at(1).get<std::size_t>()};
    if (record.injected_tokens.empty()) throw DatasetError("poison record " + record.sample_id + " has no tokens");
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw DatasetError(std::string("malformed poison record: ") + e.what());
  }
}

void save_poison_records(const std::vector<PoisonRecord>& records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write poison records: " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  out.flush();
  if (!out) throw DatasetError("I/O failure writing poison records: " + path.string());
}

std::vector<PoisonRecord> load_poison_records(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot open poison records: " + path.string());
  std::vector<PoisonRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(nlohmann::ordered_json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": malformed poison record: " + e.what());
    } catch (const DatasetError& e) {
      throw DatasetError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace codepurify
