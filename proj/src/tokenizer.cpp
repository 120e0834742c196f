#include "codepurify/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "codepurify/error.hpp"

namespace codepurify {
namespace {

// Longest first within each length bucket is not required; matching tries
// the 3- and 2-character tables before falling back to a single byte.
constexpr std::array<std::string_view, 7> kOps3 = {">>=", "<<=", "...", "===", "!==", ">>>", "**="};
constexpr std::array<std::string_view, 26> kOps2 = {"==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
                                                    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "->", "::",
                                                    "<<", ">>", "//", "/*", "*/", "=>", "**", "?."};

constexpr std::size_t kInteriorMinMatch = 3;

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_lower(unsigned char c) { return c >= 'a' && c <= 'z'; }
bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }
bool is_alpha(unsigned char c) { return is_lower(c) || is_upper(c) || c == '$'; }
bool is_ident_start(unsigned char c) { return is_alpha(c) || c == '_'; }
bool is_ident_char(unsigned char c) { return is_ident_start(c) || is_digit(c); }
bool is_hex(unsigned char c) { return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); }

// Length of a well-formed UTF-8 sequence starting at `pos`, or 0.
std::size_t utf8_length(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t len = 0;
  if ((lead & 0xE0) == 0xC0 && lead >= 0xC2) {
    len = 2;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
  } else if ((lead & 0xF8) == 0xF0 && lead <= 0xF4) {
    len = 4;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    if ((static_cast<unsigned char>(s[pos + i]) & 0xC0) != 0x80) return 0;
  }
  return len;
}

std::size_t scan_number(std::string_view s, std::size_t pos) {
  std::size_t i = pos;
  if (s[i] == '0' && i + 1 < s.size() && (s[i + 1] == 'x' || s[i + 1] == 'X' || s[i + 1] == 'b' || s[i + 1] == 'B')) {
    i += 2;
    while (i < s.size() && (is_hex(s[i]) || s[i] == '_')) ++i;
  } else {
    while (i < s.size() && (is_digit(s[i]) || s[i] == '_')) ++i;
    if (i + 1 < s.size() && s[i] == '.' && is_digit(s[i + 1])) {
      ++i;
      while (i < s.size() && (is_digit(s[i]) || s[i] == '_')) ++i;
    }
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
      std::size_t j = i + 1;
      if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
      if (j < s.size() && is_digit(s[j])) {
        i = j;
        while (i < s.size() && is_digit(s[i])) ++i;
      }
    }
  }
  // Type suffixes such as 1.0f, 10L, 3u.
  while (i < s.size() && is_alpha(s[i])) ++i;
  return i;
}

std::size_t scan_operator(std::string_view s, std::size_t pos) {
  const std::string_view rest = s.substr(pos);
  for (auto op : kOps3) {
    if (rest.starts_with(op)) return op.size();
  }
  for (auto op : kOps2) {
    if (rest.starts_with(op)) return op.size();
  }
  return 1;
}

void push(std::string_view code, std::size_t begin, std::size_t end, std::vector<Token>& out) {
  out.push_back(Token{std::string(code.substr(begin, end - begin)), Span{begin, end}});
}

}  // namespace

std::string_view to_string(TokenizerMode mode) { return mode == TokenizerMode::Fine ? "fine" : "coarse"; }

TokenizerMode parse_tokenizer_mode(std::string_view name) {
  if (name == "fine") return TokenizerMode::Fine;
  if (name == "coarse") return TokenizerMode::Coarse;
  throw ConfigError("unknown tokenizer mode: " + std::string(name) + " (expected fine|coarse)");
}

std::vector<std::string> TokenSequence::texts() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

Tokenizer::Tokenizer(TokenizerMode mode) : mode_(mode) {}

Tokenizer::Tokenizer(TokenizerMode mode, const std::vector<std::string>& vocabulary)
    : mode_(mode), vocabulary_(vocabulary.begin(), vocabulary.end()) {}

Tokenizer Tokenizer::fit(const Dataset& clean, TokenizerMode mode) {
  const Tokenizer base(mode);
  Tokenizer fitted(mode);
  for (const auto& sample : clean.samples) {
    for (auto& token : base.tokenize(sample.code).tokens) fitted.vocabulary_.insert(std::move(token.text));
  }
  return fitted;
}

TokenSequence Tokenizer::tokenize(std::string_view code, std::string sample_id) const {
  TokenSequence seq;
  seq.sample_id = std::move(sample_id);
  auto& out = seq.tokens;
  out.reserve(code.size() / 3 + 1);

  std::size_t i = 0;
  while (i < code.size()) {
    const auto c = static_cast<unsigned char>(code[i]);
    if (is_space(c)) {
      ++i;
    } else if (is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < code.size() && is_ident_char(code[j])) ++j;
      if (mode_ == TokenizerMode::Coarse) {
        push(code, i, j, out);
      } else {
        split_identifier(code, i, j, out);
      }
      i = j;
    } else if (is_digit(c)) {
      const std::size_t j = scan_number(code, i);
      push(code, i, j, out);
      i = j;
    } else if (c >= 0x80) {
      const std::size_t len = utf8_length(code, i);
      const std::size_t j = i + (len == 0 ? 1 : len);
      push(code, i, j, out);
      i = j;
    } else {
      const std::size_t j = i + scan_operator(code, i);
      push(code, i, j, out);
      i = j;
    }
  }
  return seq;
}

void Tokenizer::split_identifier(std::string_view code, std::size_t begin, std::size_t end,
                                 std::vector<Token>& out) const {
  const std::size_t before = out.size();
  std::size_t start = begin;
  auto flush = [&](std::size_t stop) {
    if (stop > start) {
      if (is_digit(code[start])) {
        push(code, start, stop, out);
      } else {
        split_piece(code, start, stop, out);
      }
    }
  };

  for (std::size_t i = begin; i < end; ++i) {
    const auto c = static_cast<unsigned char>(code[i]);
    if (c == '_') {
      flush(i);
      start = i + 1;
      continue;
    }
    if (i == start) continue;
    const auto prev = static_cast<unsigned char>(code[i - 1]);
    const bool boundary =
        (is_digit(prev) != is_digit(c)) || (is_lower(prev) && is_upper(c)) ||
        (is_upper(prev) && is_upper(c) && i + 1 < end && is_lower(static_cast<unsigned char>(code[i + 1])));
    if (boundary) {
      flush(i);
      start = i;
    }
  }
  flush(end);

  // Identifiers made only of underscores keep their text.
  if (out.size() == before) push(code, begin, end, out);
}

void Tokenizer::split_piece(std::string_view code, std::size_t begin, std::size_t end,
                            std::vector<Token>& out) const {
  const std::string_view piece = code.substr(begin, end - begin);
  if (vocabulary_.empty() || vocabulary_.contains(std::string(piece))) {
    push(code, begin, end, out);
    return;
  }

  std::size_t residual = std::string_view::npos;
  std::size_t i = 0;
  std::string probe;
  while (i < piece.size()) {
    const std::size_t min_len = i == 0 ? 1 : kInteriorMinMatch;
    std::size_t best = 0;
    for (std::size_t len = piece.size() - i; len >= min_len && len > 0; --len) {
      probe.assign(piece.substr(i, len));
      if (vocabulary_.contains(probe)) {
        best = len;
        break;
      }
    }
    if (best == 0) {
      if (residual == std::string_view::npos) residual = i;
      ++i;
      continue;
    }
    if (residual != std::string_view::npos) {
      push(code, begin + residual, begin + i, out);
      residual = std::string_view::npos;
    }
    push(code, begin + i, begin + i + best, out);
    i += best;
  }
  if (residual != std::string_view::npos) push(code, begin + residual, end, out);
}

std::vector<GranularityRow> granularity_report(const Dataset& dataset, std::string_view alternative) {
  const TokenizerMode alt = parse_tokenizer_mode(alternative);
  if (dataset.empty()) throw ConfigError("granularity report needs a non-empty dataset");

  std::vector<TokenizerMode> modes{TokenizerMode::Fine};
  if (alt != TokenizerMode::Fine) modes.push_back(alt);

  std::vector<GranularityRow> rows;
  for (TokenizerMode mode : modes) {
    const Tokenizer tokenizer = Tokenizer::fit(dataset, mode);
    GranularityRow row;
    row.mode = mode;
    row.samples = dataset.size();
    std::unordered_set<std::string> distinct;
    std::size_t chars = 0;
    for (const auto& sample : dataset.samples) {
      for (const auto& token : tokenizer.tokenize(sample.code).tokens) {
        ++row.token_count;
        chars += token.text.size();
        distinct.insert(token.text);
      }
    }
    row.vocabulary_size = distinct.size();
    row.mean_token_length = row.token_count == 0 ? 0.0 : static_cast<double>(chars) / row.token_count;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace codepurify
