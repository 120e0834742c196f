#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codepurify/dataset.hpp"
#include "codepurify/pcfg.hpp"
#include "codepurify/random.hpp"
#include "codepurify/tokenizer.hpp"

namespace codepurify {

enum class AttackStrategy { BadCodeFixed, BadCodeMixed, BncFixed, BncGrammar, CodePoisonerVariable };

std::string_view to_string(AttackStrategy strategy);
AttackStrategy parse_attack_strategy(std::string_view name);

inline const std::vector<std::string>& badcode_trigger_pool() {
  static const std::vector<std::string> pool = {"rb", "xt", "il", "ite", "wb"};
  return pool;
}

inline constexpr std::string_view kDefaultDeadCode = "if (rand() < 0) print(\"fail\");";
inline constexpr std::string_view kDefaultRenamePrefix = "ret_Val_";

struct AttackConfig {
  AttackStrategy strategy = AttackStrategy::BadCodeFixed;
  double rate = 0.01;
  std::uint64_t seed = 0;

  std::string fixed_token = "rb";
  std::vector<std::string> token_pool = badcode_trigger_pool();
  std::string dead_code = std::string(kDefaultDeadCode);
  Grammar grammar = default_dead_code_grammar();
  std::string rename_prefix = std::string(kDefaultRenamePrefix);
  // Full trigger name for identifier renaming; derived from the prefix and
  // the seed when empty.
  std::string rename_trigger;
  // Replaces the label of mutated samples when set.
  std::optional<std::string> target_label;
};

struct PoisonRecord {
  std::string sample_id;
  AttackStrategy strategy = AttackStrategy::BadCodeFixed;
  std::vector<std::string> injected_tokens;
  Span injection_site;

  friend bool operator==(const PoisonRecord&, const PoisonRecord&) = default;
};

struct PoisonResult {
  Dataset poisoned;
  std::vector<PoisonRecord> records;  // dataset order
  std::vector<std::string> warnings;
};

/// Number of samples `poison` mutates: round(rate * n). Throws when rate is
/// outside [0, 1] or a positive rate rounds to zero.
std::size_t poison_count(double rate, std::size_t n);

/// Mutates exactly poison_count(rate, n) samples chosen uniformly by seed;
/// every other sample is copied verbatim with poisoned = false. Samples
/// without a usable injection site are skipped with a warning and another
/// sample is drawn. Throws AttackError when too few samples are eligible.
PoisonResult poison(const Dataset& clean, const AttackConfig& config);

/// Renaming trigger used by the codepoisoner-variable strategy.
std::string rename_trigger_name(const AttackConfig& config);

struct Mutation {
  std::string code;
  std::vector<std::string> injected_tokens;
  Span injection_site;
};

/// Appends `trigger` to a function name (or, failing that, a variable) at
/// every occurrence.
std::optional<Mutation> append_trigger(std::string_view code, std::string_view trigger, Rng& rng);

/// Inserts `statement` at a uniformly chosen statement boundary.
std::optional<Mutation> insert_dead_code(std::string_view code, std::string_view statement, Rng& rng);

/// Consistently renames one declared variable or parameter to `new_name`.
std::optional<Mutation> rename_identifier(std::string_view code, std::string_view new_name, Rng& rng);

nlohmann::ordered_json record_to_json(const PoisonRecord& record);
PoisonRecord record_from_json(const nlohmann::ordered_json& doc);
void save_poison_records(const std::vector<PoisonRecord>& records, const std::filesystem::path& path);
std::vector<PoisonRecord> load_poison_records(const std::filesystem::path& path);

}  // namespace codepurify
