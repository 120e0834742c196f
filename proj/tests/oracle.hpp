#pragma once

// Independent reference implementations used by the tests. They recompute
// everything from scratch with full-sequence scoring and share nothing with
// the optimized paths except the model's per-prediction loss.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "codepurify/detector.hpp"
#include "codepurify/ngram_model.hpp"
#include "codepurify/random.hpp"

namespace oracle {

using namespace codepurify;

inline std::vector<TokenId> without(const std::vector<TokenId>& ids, std::size_t drop) {
  std::vector<TokenId> out;
  out.reserve(ids.size() - 1);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i != drop) out.push_back(ids[i]);
  }
  return out;
}

/// Enumerates every single-token deletion of every sample and rescores the
/// shortened sequence in full.
inline TriggerReport brute_force_triggers(const NGramModel& model, const Dataset& suspect, std::size_t k,
                                          EntropyMode mode = EntropyMode::PerToken) {
  struct Acc {
    loss::Ticks ticks = 0;
    std::size_t support = 0;
  };
  const Tokenizer tokenizer = model.make_tokenizer();
  std::map<std::string, Acc> table;
  std::vector<std::vector<std::string>> texts;
  for (const auto& sample : suspect.samples) {
    const auto seq = tokenizer.tokenize(sample.code, sample.id);
    texts.push_back(seq.texts());
    if (seq.size() < 2) continue;
    const auto ids = model.encode(seq);
    const auto base = model.cross_entropy(ids, mode);
    std::set<std::string> seen;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      const auto shortened = model.cross_entropy(without(ids, t), mode);
      if (!(shortened.value < base.value)) continue;
      const loss::Ticks d = mode == EntropyMode::Total
                                ? base.total_ticks - shortened.total_ticks
                                : std::max<loss::Ticks>(loss::to_ticks(base.value - shortened.value), 1);
      auto& acc = table[seq.tokens[t].text];
      acc.ticks += d;
      if (seen.insert(seq.tokens[t].text).second) ++acc.support;
    }
  }

  TriggerReport report;
  report.order = model.order();
  report.k = k;
  report.entropy_mode = mode;
  report.tokenizer_mode = model.tokenizer_mode();
  for (const auto& [token, acc] : table) {
    report.entries.push_back(TriggerEntry{token, loss::to_nats(acc.ticks), acc.ticks, acc.support});
  }
  std::stable_sort(report.entries.begin(), report.entries.end(),
                   [](const TriggerEntry& a, const TriggerEntry& b) { return a.cumulative_ticks > b.cumulative_ticks; });
  for (std::size_t i = 0; i < std::min(k, report.entries.size()); ++i) report.selected.push_back(report.entries[i].token);
  const std::set<std::string> chosen(report.selected.begin(), report.selected.end());
  for (std::size_t s = 0; s < suspect.size(); ++s) {
    for (const auto& t : texts[s]) {
      if (chosen.contains(t)) {
        report.flagged_ids.push_back(suspect.samples[s].id);
        break;
      }
    }
  }
  return report;
}

/// Small random corpus over a handful of words so that n-gram statistics
/// are dense enough to produce both positive and negative deltas.
inline Dataset micro_dataset(Rng& rng, std::size_t max_samples, std::size_t max_tokens, const std::string& prefix) {
  static const std::vector<std::string> words = {"foo", "bar", "baz", "qux", "(", ")", ";", "=", "42", "rb"};
  Dataset d;
  const std::size_t n = 1 + rng.below(max_samples);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = 1 + rng.below(max_tokens);
    std::string code;
    for (std::size_t t = 0; t < len; ++t) {
      if (t > 0) code += ' ';
      code += rng.pick(words);
    }
    d.samples.push_back(CodeSample{prefix + std::to_string(i), code, std::nullopt, std::nullopt, {}});
  }
  return d;
}

/// Σ p(w | context) over every predictable symbol.
inline double probability_mass(const NGramModel& model, const std::vector<TokenId>& context) {
  double sum = 0.0;
  for (TokenId w : model.predictable_ids()) sum += model.prob(context, w);
  return sum;
}

}  // namespace oracle
