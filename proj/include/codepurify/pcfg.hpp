#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "codepurify/random.hpp"
#include "json.hpp"

namespace codepurify {

/// Probabilistic context-free grammar for dead-code triggers.
///
/// A right-hand-side symbol written `<NAME>` refers to the nonterminal NAME;
/// anything else is emitted literally. `<FLOAT>` and `<INT>` are built-in
/// terminals drawn uniformly from the configured ranges.
struct Production {
  std::vector<std::string> symbols;
  double probability = 1.0;
};

struct Grammar {
  std::string start = "STMT";
  std::map<std::string, std::vector<Production>> rules;
  double float_min = 0.0;
  double float_max = 1.0;
  int float_decimals = 2;
  std::int64_t int_min = -100;
  std::int64_t int_max = 100;
};

/// `if (<fn>(<float>) <cmp> <int>) <action>("<msg>");` with fn in
/// {sin, cos, exp, sqrt, rand} (optionally `Math.`-qualified).
Grammar default_dead_code_grammar();

/// Throws ConfigError when a nonterminal has no productions, probabilities
/// do not sum to 1 within 1e-9, a reference is undefined, or a range is empty.
void validate_grammar(const Grammar& grammar);

std::string generate(const Grammar& grammar, Rng& rng);
std::string gen_dead_code(const Grammar& grammar, std::uint64_t seed);

/// Whether `text` is in the language of the grammar (ignoring probabilities).
bool derives(const Grammar& grammar, std::string_view text);

nlohmann::ordered_json grammar_to_json(const Grammar& grammar);
Grammar grammar_from_json(const nlohmann::ordered_json& doc);

}  // namespace codepurify
