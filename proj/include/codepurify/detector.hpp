#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "codepurify/dataset.hpp"
#include "codepurify/ngram_model.hpp"
#include "codepurify/tokenizer.hpp"

namespace codepurify {

inline constexpr std::size_t kDefaultTopK = 10;
inline constexpr std::size_t kDefaultMaxSeqLen = 2048;

struct DetectorConfig {
  std::size_t k = kDefaultTopK;
  std::size_t max_seq_len = kDefaultMaxSeqLen;
  EntropyMode entropy_mode = EntropyMode::PerToken;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Entropy of a sequence and of each single-token deletion of it.
struct DeletionEntropies {
  EntropyScore original;
  // One entry per token; `scorable` is false when the deletion would leave
  // nothing to score (single-token sequences).
  std::vector<double> deleted;
  std::vector<loss::Ticks> deleted_ticks;
  std::vector<bool> scorable;
};

/// Computes every deletion with windowed rescoring: dropping token i only
/// changes the predictions at i .. i+order-1, so each deletion costs O(order)
/// lookups instead of a full pass.
DeletionEntropies deletion_entropies(const NGramModel& model, std::span<const TokenId> ids, EntropyMode mode);

struct ScoredDeletion {
  Token token;
  std::size_t position = 0;
  double delta = 0.0;           // e - e_i, always > 0
  loss::Ticks delta_ticks = 0;  // delta as accumulated
  std::string sample_id;
};

/// Deletions that lower the sequence entropy. Sequences longer than
/// `config.max_seq_len` are truncated; a note is appended to `warnings`
/// when given.
std::vector<ScoredDeletion> score_sample(const NGramModel& model, const TokenSequence& sequence,
                                         const DetectorConfig& config = {},
                                         std::vector<std::string>* warnings = nullptr);

struct TriggerEntry {
  std::string token;
  double cumulative_delta = 0.0;
  loss::Ticks cumulative_ticks = 0;
  std::size_t support = 0;  // samples with at least one contributing deletion

  friend bool operator==(const TriggerEntry&, const TriggerEntry&) = default;
};

struct TriggerReport {
  int order = kDefaultOrder;
  std::size_t k = kDefaultTopK;
  EntropyMode entropy_mode = EntropyMode::PerToken;
  TokenizerMode tokenizer_mode = TokenizerMode::Fine;
  std::vector<TriggerEntry> entries;  // cumulative delta desc, then token asc
  std::vector<std::string> selected;
  std::vector<std::string> flagged_ids;
  std::vector<std::string> warnings;
};

/// Ranks tokens by their summed entropy decrease over every deletion in the
/// suspect set and selects the top k. Samples are scored in parallel; the
/// merge is exact so the report does not depend on sample order or thread
/// count.
TriggerReport identify_triggers(const NGramModel& model, const Dataset& suspect, const DetectorConfig& config = {});

/// Ids of samples whose token sequence contains any of `selected`.
std::vector<std::string> flag_samples(const Dataset& suspect, const std::vector<std::string>& selected,
                                      const Tokenizer& tokenizer);

struct PurifyResult {
  Dataset clean;
  Dataset removed;
};

/// Removes whole samples containing a selected trigger token; tokens are
/// never excised.
PurifyResult purify(const Dataset& suspect, const TriggerReport& report, const Tokenizer& tokenizer);

struct OnionScore {
  Token token;
  double suspicion = 0.0;  // e - e_i; deletion lowers entropy when > 0
  bool flagged = false;
};

/// Single-sample threshold-0 baseline, kept for comparison only.
std::vector<OnionScore> onion_baseline_score(const NGramModel& model, const TokenSequence& sequence,
                                             EntropyMode mode = EntropyMode::PerToken);

}  // namespace codepurify
