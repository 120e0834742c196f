#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "codepurify/dataset.hpp"

namespace codepurify {

enum class TokenizerMode { Fine, Coarse };

std::string_view to_string(TokenizerMode mode);
TokenizerMode parse_tokenizer_mode(std::string_view name);

/// Half-open byte range into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const Span&, const Span&) = default;
};

struct Token {
  std::string text;
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

struct TokenSequence {
  std::vector<Token> tokens;
  std::string sample_id;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<std::string> texts() const;
};

/// Two-stage code lexer.
///
/// Stage 1 splits on whitespace, operators and punctuation, and isolates
/// number literals. String and comment contents are lexed like code. Stage 2
/// (fine mode only) breaks identifiers at underscores, camelCase humps and
/// letter/digit boundaries, then splits any piece missing from the subword
/// vocabulary by greedy longest match, so an unknown suffix glued onto a
/// known word (`filerb`) comes out as its own residual token (`file`, `rb`).
///
/// Vocabulary matching inside a piece needs at least three characters; only
/// the leading match may be shorter. An empty vocabulary disables the greedy
/// split.
class Tokenizer {
 public:
  explicit Tokenizer(TokenizerMode mode = TokenizerMode::Fine);
  Tokenizer(TokenizerMode mode, const std::vector<std::string>& vocabulary);

  /// Learns the subword vocabulary from the stage 1+2 pieces of `clean`.
  static Tokenizer fit(const Dataset& clean, TokenizerMode mode);

  TokenSequence tokenize(std::string_view code, std::string sample_id = {}) const;

  TokenizerMode mode() const { return mode_; }
  bool has_vocabulary() const { return !vocabulary_.empty(); }
  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  void split_identifier(std::string_view code, std::size_t begin, std::size_t end, std::vector<Token>& out) const;
  void split_piece(std::string_view code, std::size_t begin, std::size_t end, std::vector<Token>& out) const;

  TokenizerMode mode_;
  std::unordered_set<std::string> vocabulary_;
};

struct GranularityRow {
  TokenizerMode mode = TokenizerMode::Fine;
  std::size_t samples = 0;
  std::size_t token_count = 0;
  std::size_t vocabulary_size = 0;
  double mean_token_length = 0.0;
};

/// Token statistics of `dataset` under the fine tokenizer and under
/// `alternative` (one row per distinct mode).
std::vector<GranularityRow> granularity_report(const Dataset& dataset, std::string_view alternative);

}  // namespace codepurify
