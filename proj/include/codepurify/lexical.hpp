#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "codepurify/tokenizer.hpp"

namespace codepurify::lexical {

enum class Kind { Identifier, Number, String, Comment, Punct };

struct Lexeme {
  Kind kind = Kind::Punct;
  Span span;
  int brace_depth = 0;  // depth of `{` nesting before this lexeme
  int paren_depth = 0;
};

/// Language-agnostic lexical scan used to find injection sites. String,
/// character and comment bodies are single lexemes so identifiers inside
/// them are never touched.
std::vector<Lexeme> scan(std::string_view code);

bool is_keyword(std::string_view word);

/// Names at function definition sites: an identifier at brace depth 0,
/// followed by `(`, preceded by a type-like token or a definition keyword.
std::vector<std::string> function_names(std::string_view code);

/// Declared local variables and parameters, first-seen order, no duplicates.
std::vector<std::string> variable_names(std::string_view code);

/// Spans of every identifier lexeme equal to `name` that is not a member
/// access (`x.name`).
std::vector<Span> occurrences(std::string_view code, std::string_view name);

/// Renames every occurrence of `from`; returns nullopt when none exist.
std::optional<std::string> rename(std::string_view code, std::string_view from, std::string_view to);

/// Byte offsets where a new statement can start inside a function body:
/// right after the body's opening `{` and after each `;` at brace depth 1
/// outside parentheses. Brace-less code falls back to line ends.
std::vector<std::size_t> statement_boundaries(std::string_view code);

}  // namespace codepurify::lexical
