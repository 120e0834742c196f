#include "codepurify/detector.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "codepurify/error.hpp"

namespace codepurify {

DeletionEntropies deletion_entropies(const NGramModel& model, std::span<const TokenId> ids, EntropyMode mode) {
  if (ids.empty()) throw ModelError("cannot score an empty token sequence");

  const std::size_t history = static_cast<std::size_t>(model.order() - 1);
  const auto padded = model.pad(ids);
  const std::size_t last = padded.size() - 1;

  std::vector<loss::Ticks> losses(padded.size(), 0);
  loss::Ticks total = 0;
  for (std::size_t j = history; j <= last; ++j) {
    losses[j] = model.loss_at(padded, j);
    total += losses[j];
  }

  DeletionEntropies out;
  out.original.token_count = ids.size() + 1;
  out.original.total_ticks = total;
  out.original.value = loss::entropy_value(total, out.original.token_count, mode);
  out.deleted.assign(ids.size(), out.original.value);
  out.deleted_ticks.assign(ids.size(), total);
  out.scorable.assign(ids.size(), ids.size() > 1);
  if (ids.size() == 1) return out;

  std::vector<TokenId> context(history);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const std::size_t i = history + t;
    const std::size_t hi = std::min(i + history, last);

    loss::Ticks changed = 0;
    for (std::size_t j = i; j <= hi; ++j) changed -= losses[j];
    for (std::size_t j = i + 1; j <= hi; ++j) {
      // The history of j in the shortened sequence: the order tokens before
      // j with position i removed.
      std::size_t w = 0;
      for (std::size_t p = j - history - 1; p < j; ++p) {
        if (p != i) context[w++] = padded[p];
      }
      changed += model.loss_ticks(context, padded[j]);
    }
    const loss::Ticks shortened = total + changed;
    out.deleted_ticks[t] = shortened;
    out.deleted[t] = loss::entropy_value(shortened, ids.size(), mode);
  }
  return out;
}

namespace {

loss::Ticks delta_ticks(const DeletionEntropies& d, std::size_t t, double delta, EntropyMode mode) {
  if (mode == EntropyMode::Total) return d.original.total_ticks - d.deleted_ticks[t];
  // Keep strictly positive deltas strictly positive after quantization.
  return std::max<loss::Ticks>(loss::to_ticks(delta), 1);
}

struct Accumulator {
  loss::Ticks ticks = 0;
  std::size_t support = 0;
};

using TokenTable = std::unordered_map<std::string, Accumulator>;

}  // namespace

std::vector<ScoredDeletion> score_sample(const NGramModel& model, const TokenSequence& sequence,
                                         const DetectorConfig& config, std::vector<std::string>* warnings) {
  if (sequence.empty()) throw ModelError("cannot score an empty token sequence");
  if (config.max_seq_len < static_cast<std::size_t>(model.order())) {
    throw ConfigError("max_seq_len must be at least the model order");
  }

  std::size_t length = sequence.size();
  if (length > config.max_seq_len) {
    if (warnings != nullptr) {
      warnings->push_back("sample " + sequence.sample_id + " truncated from " + std::to_string(length) + " to " +
                          std::to_string(config.max_seq_len) + " tokens");
    }
    length = config.max_seq_len;
  }

  std::vector<TokenId> ids;
  ids.reserve(length);
  for (std::size_t t = 0; t < length; ++t) ids.push_back(model.id_of(sequence.tokens[t].text));

  const auto d = deletion_entropies(model, ids, config.entropy_mode);
  std::vector<ScoredDeletion> out;
  for (std::size_t t = 0; t < length; ++t) {
    if (!d.scorable[t] || !(d.deleted[t] < d.original.value)) continue;
    ScoredDeletion s;
    s.token = sequence.tokens[t];
    s.position = t;
    s.delta = d.original.value - d.deleted[t];
    s.delta_ticks = delta_ticks(d, t, s.delta, config.entropy_mode);
    s.sample_id = sequence.sample_id;
    out.push_back(std::move(s));
  }
  return out;
}

TriggerReport identify_triggers(const NGramModel& model, const Dataset& suspect, const DetectorConfig& config) {
  if (suspect.empty()) throw DatasetError("cannot identify triggers in an empty dataset");
  if (config.max_seq_len < static_cast<std::size_t>(model.order())) {
    throw ConfigError("max_seq_len must be at least the model order");
  }

  const Tokenizer tokenizer = model.make_tokenizer();
  const std::size_t n = suspect.size();
  unsigned workers = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

  std::vector<TokenTable> tables(workers);
  std::vector<std::vector<std::string>> sample_warnings(n);
  std::vector<std::vector<std::string>> sample_tokens(n);
  std::atomic<std::size_t> next{0};

  auto work = [&](unsigned w) {
    TokenTable& table = tables[w];
    for (std::size_t s = next.fetch_add(1); s < n; s = next.fetch_add(1)) {
      const auto& sample = suspect.samples[s];
      const auto seq = tokenizer.tokenize(sample.code, sample.id);
      if (seq.empty()) continue;
      const auto deletions = score_sample(model, seq, config, &sample_warnings[s]);
      std::unordered_set<std::string_view> contributed;
      for (const auto& del : deletions) {
        auto& acc = table[del.token.text];
        acc.ticks += del.delta_ticks;
        if (contributed.insert(del.token.text).second) ++acc.support;
      }
      auto& texts = sample_tokens[s];
      texts.reserve(seq.size());
      for (const auto& t : seq.tokens) texts.push_back(t.text);
    }
  };

  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  TokenTable merged;
  for (auto& table : tables) {
    for (auto& [token, acc] : table) {
      auto& into = merged[token];
      into.ticks += acc.ticks;
      into.support += acc.support;
    }
  }

  TriggerReport report;
  report.order = model.order();
  report.k = config.k;
  report.entropy_mode = config.entropy_mode;
  report.tokenizer_mode = model.tokenizer_mode();
  report.entries.reserve(merged.size());
  for (auto& [token, acc] : merged) {
    report.entries.push_back(TriggerEntry{token, loss::to_nats(acc.ticks), acc.ticks, acc.support});
  }
  std::sort(report.entries.begin(), report.entries.end(), [](const TriggerEntry& a, const TriggerEntry& b) {
    if (a.cumulative_ticks != b.cumulative_ticks) return a.cumulative_ticks > b.cumulative_ticks;
    return a.token < b.token;
  });

  const std::size_t take = std::min(config.k, report.entries.size());
  for (std::size_t i = 0; i < take; ++i) report.selected.push_back(report.entries[i].token);
  if (config.k > report.entries.size()) {
    report.warnings.push_back("k = " + std::to_string(config.k) + " exceeds the " +
                              std::to_string(report.entries.size()) + " distinct scored tokens; selected all of them");
  }

  const std::unordered_set<std::string> chosen(report.selected.begin(), report.selected.end());
  for (std::size_t s = 0; s < n; ++s) {
    for (auto& w : sample_warnings[s]) report.warnings.push_back(std::move(w));
    const auto& texts = sample_tokens[s];
    if (std::any_of(texts.begin(), texts.end(), [&](const std::string& t) { return chosen.contains(t); })) {
      report.flagged_ids.push_back(suspect.samples[s].id);
    }
  }
  return report;
}

std::vector<std::string> flag_samples(const Dataset& suspect, const std::vector<std::string>& selected,
                                      const Tokenizer& tokenizer) {
  std::vector<std::string> flagged;
  if (selected.empty()) return flagged;
  const std::unordered_set<std::string> chosen(selected.begin(), selected.end());
  for (const auto& sample : suspect.samples) {
    const auto seq = tokenizer.tokenize(sample.code);
    if (std::any_of(seq.tokens.begin(), seq.tokens.end(), [&](const Token& t) { return chosen.contains(t.text); })) {
      flagged.push_back(sample.id);
    }
  }
  return flagged;
}

PurifyResult purify(const Dataset& suspect, const TriggerReport& report, const Tokenizer& tokenizer) {
  if (tokenizer.mode() != report.tokenizer_mode) {
    throw ConfigError("report was produced with the " + std::string(to_string(report.tokenizer_mode)) +
                      " tokenizer but purification uses " + std::string(to_string(tokenizer.mode())));
  }
  const auto flagged = flag_samples(suspect, report.selected, tokenizer);
  const std::unordered_set<std::string> removed_ids(flagged.begin(), flagged.end());

  PurifyResult result;
  result.clean.provenance = suspect.provenance + " | purified";
  result.removed.provenance = suspect.provenance + " | removed";
  for (const auto& sample : suspect.samples) {
    (removed_ids.contains(sample.id) ? result.removed : result.clean).samples.push_back(sample);
  }
  return result;
}

std::vector<OnionScore> onion_baseline_score(const NGramModel& model, const TokenSequence& sequence,
                                             EntropyMode mode) {
  if (sequence.empty()) throw ModelError("cannot score an empty token sequence");
  const auto ids = model.encode(sequence);
  const auto d = deletion_entropies(model, ids, mode);
  std::vector<OnionScore> out;
  out.reserve(ids.size());
  for (std::size_t t = 0; t < ids.size(); ++t) {
    const double suspicion = d.scorable[t] ? d.original.value - d.deleted[t] : 0.0;
    out.push_back(OnionScore{sequence.tokens[t], suspicion, suspicion > 0.0});
  }
  return out;
}

}  // namespace codepurify
