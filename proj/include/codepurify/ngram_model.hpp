#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "codepurify/dataset.hpp"
#include "codepurify/tokenizer.hpp"

namespace codepurify {

using TokenId = std::uint32_t;

inline constexpr TokenId kUnknownId = 0;
inline constexpr TokenId kStartId = 1;
inline constexpr TokenId kEndId = 2;
inline constexpr TokenId kFirstWordId = 3;

inline constexpr int kMaxOrder = 8;
inline constexpr int kDefaultOrder = 4;
inline constexpr double kDefaultDiscount = 0.4;

enum class EntropyMode { PerToken, Total };

std::string_view to_string(EntropyMode mode);
EntropyMode parse_entropy_mode(std::string_view name);

/// Log losses are accumulated as integers in units of 2^-40 nats so that
/// sums are exact and independent of evaluation order; incremental and full
/// rescoring of a sequence therefore agree bit for bit.
namespace loss {

using Ticks = std::int64_t;
inline constexpr double kTicksPerNat = 1099511627776.0;  // 2^40

Ticks to_ticks(double nats);
double to_nats(Ticks ticks);

/// Cross-entropy of a scored window of `length` predictions with `total`
/// accumulated loss. Both the detector and `NGramModel::cross_entropy` go
/// through this function.
double entropy_value(Ticks total, std::size_t length, EntropyMode mode);

}  // namespace loss

struct EntropyScore {
  double value = 0.0;
  std::size_t token_count = 0;
  loss::Ticks total_ticks = 0;
};

struct TrainOptions {
  int order = kDefaultOrder;
  double discount = kDefaultDiscount;
  TokenizerMode tokenizer_mode = TokenizerMode::Fine;
};

/// Order-n token model with interpolated absolute discounting.
///
///   p_k(w | h) = max(c(h w) - D, 0) / c(h) + D * N1+(h .) / c(h) * p_{k-1}(w | h')
///
/// where h' drops the oldest token of h, contexts never seen fall straight
/// through to the lower order, and p_0 is uniform over the predictable
/// symbols (seen tokens, end-of-sequence, unknown). Each training sequence
/// is padded with order-1 start symbols and one end symbol.
class NGramModel {
 public:
  NGramModel() = default;

  static NGramModel train(const Dataset& clean, const TrainOptions& options = {});
  static NGramModel train(const std::vector<std::vector<std::string>>& sequences, const TrainOptions& options = {});

  int order() const { return order_; }
  double discount() const { return discount_; }
  TokenizerMode tokenizer_mode() const { return tokenizer_mode_; }
  std::uint64_t total_tokens() const { return total_tokens_; }

  /// Tokens seen in training, sorted; id of vocabulary()[i] is kFirstWordId + i.
  const std::vector<std::string>& vocabulary() const { return words_; }
  std::size_t vocabulary_size() const { return words_.size(); }

  /// Every symbol that can be predicted: unknown, end, and the vocabulary.
  std::vector<TokenId> predictable_ids() const;

  /// Tokenizer matching the training configuration, with the model's
  /// vocabulary as its subword table.
  Tokenizer make_tokenizer() const;

  TokenId id_of(std::string_view token) const;
  std::string_view text_of(TokenId id) const;
  std::vector<TokenId> encode(const TokenSequence& sequence) const;
  std::vector<TokenId> encode(const std::vector<std::string>& tokens) const;

  double prob(std::span<const TokenId> context, TokenId next) const;
  double prob(const std::vector<std::string>& context, std::string_view next) const;

  /// Unsmoothed relative frequency c(h w) / c(h); 0 for unseen contexts.
  double relative_frequency(const std::vector<std::string>& context, std::string_view next) const;
  std::uint64_t count(const std::vector<std::string>& ngram) const;

  /// -ln p(next | context) quantized to ticks.
  loss::Ticks loss_ticks(std::span<const TokenId> context, TokenId next) const;

  /// Prepends order-1 start symbols and appends the end symbol.
  std::vector<TokenId> pad(std::span<const TokenId> ids) const;

  /// Loss of the prediction at `position` of a padded sequence.
  loss::Ticks loss_at(std::span<const TokenId> padded, std::size_t position) const;

  EntropyScore cross_entropy(std::span<const TokenId> ids, EntropyMode mode = EntropyMode::PerToken) const;
  EntropyScore cross_entropy(const TokenSequence& sequence, EntropyMode mode = EntropyMode::PerToken) const;

  std::string serialize() const;
  static NGramModel deserialize(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static NGramModel load(const std::filesystem::path& path);

  friend bool operator==(const NGramModel& a, const NGramModel& b);

 private:
  struct Key {
    std::array<TokenId, kMaxOrder> ids{};
    std::uint8_t size = 0;

    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };
  struct ContextStats {
    std::uint64_t total = 0;
    std::uint32_t distinct = 0;
  };

  static Key make_key(std::span<const TokenId> ids);
  void add_sequence(std::span<const TokenId> ids);
  void rebuild_contexts();
  void assign_vocabulary(std::vector<std::string> words);
  static void check_options(const TrainOptions& options);

  int order_ = kDefaultOrder;
  double discount_ = kDefaultDiscount;
  TokenizerMode tokenizer_mode_ = TokenizerMode::Fine;
  std::uint64_t total_tokens_ = 0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> ids_;
  std::unordered_map<Key, std::uint32_t, KeyHash> grams_;
  std::unordered_map<Key, ContextStats, KeyHash> contexts_;
};

}  // namespace codepurify
