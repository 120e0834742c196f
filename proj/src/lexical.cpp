#include "codepurify/lexical.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

namespace codepurify::lexical {
namespace {

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> words = {
      "if",        "else",      "for",       "while",     "do",       "switch",     "case",     "default",
      "return",    "new",       "throw",     "throws",    "try",      "catch",      "finally",  "break",
      "continue",  "class",     "interface", "enum",      "extends",  "implements", "import",   "package",
      "public",    "private",   "protected", "static",    "final",    "abstract",   "synchronized",
      "native",    "volatile",  "transient", "void",      "int",      "long",       "short",    "byte",
      "char",      "float",     "double",    "boolean",   "bool",     "var",        "let",      "const",
      "auto",      "unsigned",  "signed",    "struct",    "def",      "function",   "func",     "fn",
      "lambda",    "pass",      "yield",     "in",        "is",       "not",        "and",      "or",
      "null",      "nullptr",   "true",      "false",     "None",     "True",       "False",    "this",
      "self",      "super",     "instanceof", "typeof",   "sizeof",   "delete",     "goto",     "assert",
      "await",     "async",     "operator",  "template",  "typename", "namespace",  "using",    "elif",
      "except",    "raise",     "with",      "as",        "from",     "global",     "nonlocal", "del"};
  return words;
}

const std::unordered_set<std::string_view>& type_keywords() {
  static const std::unordered_set<std::string_view> words = {
      "void", "int",   "long",     "short",  "byte",  "char", "float", "double", "boolean",
      "bool", "var",   "let",      "const",  "auto",  "unsigned", "signed", "final"};
  return words;
}

const std::unordered_set<std::string_view>& definition_keywords() {
  static const std::unordered_set<std::string_view> words = {"def", "function", "func", "fn"};
  return words;
}

bool ident_start(unsigned char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$'; }
bool ident_char(unsigned char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

std::string_view text(std::string_view code, const Lexeme& l) { return code.substr(l.span.begin, l.span.size()); }

bool is_punct(std::string_view code, const Lexeme& l, std::string_view p) {
  return l.kind == Kind::Punct && text(code, l) == p;
}

// Significant lexemes only: comments are dropped.
std::vector<Lexeme> significant(std::string_view code) {
  auto all = scan(code);
  std::erase_if(all, [](const Lexeme& l) { return l.kind == Kind::Comment; });
  return all;
}

bool type_like(std::string_view code, const Lexeme& l) {
  if (l.kind == Kind::Identifier) {
    const auto t = text(code, l);
    return !is_keyword(t) || type_keywords().contains(t);
  }
  return is_punct(code, l, ">") || is_punct(code, l, "]");
}

bool member_access(std::string_view code, const std::vector<Lexeme>& lx, std::size_t i) {
  if (i == 0 || !is_punct(code, lx[i - 1], ".")) return false;
  if (i >= 2 && lx[i - 2].kind == Kind::Identifier) {
    const auto owner = text(code, lx[i - 2]);
    if (owner == "this" || owner == "self") return false;
  }
  return true;
}

}  // namespace

bool is_keyword(std::string_view word) { return keywords().contains(word); }

std::vector<Lexeme> scan(std::string_view code) {
  std::vector<Lexeme> out;
  int braces = 0;
  int parens = 0;
  std::size_t i = 0;
  auto emit = [&](Kind kind, std::size_t begin, std::size_t end) {
    out.push_back(Lexeme{kind, Span{begin, end}, braces, parens});
  };
  while (i < code.size()) {
    const auto c = static_cast<unsigned char>(code[i]);
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      continue;
    }
    const std::size_t begin = i;
    if (code.substr(i).starts_with("//") || c == '#') {
      while (i < code.size() && code[i] != '\n') ++i;
      emit(Kind::Comment, begin, i);
    } else if (code.substr(i).starts_with("/*")) {
      const auto close = code.find("*/", i + 2);
      i = close == std::string_view::npos ? code.size() : close + 2;
      emit(Kind::Comment, begin, i);
    } else if (c == '"' || c == '\'') {
      const std::string_view rest = code.substr(i);
      if (rest.starts_with("\"\"\"") || rest.starts_with("'''")) {
        const auto close = code.find(rest.substr(0, 3), i + 3);
        i = close == std::string_view::npos ? code.size() : close + 3;
      } else {
        ++i;
        while (i < code.size() && code[i] != static_cast<char>(c) && code[i] != '\n') {
          i += code[i] == '\\' && i + 1 < code.size() ? 2 : 1;
        }
        if (i < code.size() && code[i] == static_cast<char>(c)) ++i;
      }
      emit(Kind::String, begin, std::min(i, code.size()));
    } else if (ident_start(c)) {
      while (i < code.size() && ident_char(code[i])) ++i;
      emit(Kind::Identifier, begin, i);
    } else if (c >= '0' && c <= '9') {
      while (i < code.size() && (ident_char(code[i]) || code[i] == '.')) ++i;
      emit(Kind::Number, begin, i);
    } else {
      if (c == '}') braces = std::max(0, braces - 1);
      if (c == ')') parens = std::max(0, parens - 1);
      emit(Kind::Punct, begin, i + 1);
      if (c == '{') ++braces;
      if (c == '(') ++parens;
      ++i;
    }
  }
  return out;
}

std::vector<std::string> function_names(std::string_view code) {
  const auto lx = significant(code);
  std::vector<std::string> names;
  for (std::size_t i = 0; i + 1 < lx.size(); ++i) {
    const auto& l = lx[i];
    if (l.kind != Kind::Identifier || l.brace_depth != 0 || l.paren_depth != 0) continue;
    if (!is_punct(code, lx[i + 1], "(")) continue;
    const auto name = text(code, l);
    if (is_keyword(name) || i == 0) continue;
    const auto& prev = lx[i - 1];
    const bool defined = type_like(code, prev) ||
                         (prev.kind == Kind::Identifier && definition_keywords().contains(text(code, prev)));
    if (!defined) continue;
    if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
  }
  return names;
}

std::vector<std::string> variable_names(std::string_view code) {
  const auto lx = significant(code);
  static constexpr std::array<std::string_view, 5> kFollowers = {"=", ";", ",", ")", ":"};
  std::vector<std::string> names;
  for (std::size_t i = 1; i + 1 < lx.size(); ++i) {
    const auto& l = lx[i];
    if (l.kind != Kind::Identifier) continue;
    const auto name = text(code, l);
    if (is_keyword(name) || !type_like(code, lx[i - 1])) continue;
    if (member_access(code, lx, i)) continue;
    const bool follows = std::any_of(kFollowers.begin(), kFollowers.end(),
                                     [&](std::string_view f) { return is_punct(code, lx[i + 1], f); });
    // `a == b` is a comparison, not an initializer.
    if (!follows || (is_punct(code, lx[i + 1], "=") && i + 2 < lx.size() && is_punct(code, lx[i + 2], "="))) {
      continue;
    }
    if (std::find(names.begin(), names.end(), name) == names.end()) names.emplace_back(name);
  }
  return names;
}

std::vector<Span> occurrences(std::string_view code, std::string_view name) {
  const auto lx = significant(code);
  std::vector<Span> spans;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    if (lx[i].kind == Kind::Identifier && text(code, lx[i]) == name && !member_access(code, lx, i)) {
      spans.push_back(lx[i].span);
    }
  }
  return spans;
}

std::optional<std::string> rename(std::string_view code, std::string_view from, std::string_view to) {
  const auto spans = occurrences(code, from);
  if (spans.empty()) return std::nullopt;
  std::string out(code);
  for (auto it = spans.rbegin(); it != spans.rend(); ++it) out.replace(it->begin, it->size(), to);
  return out;
}

std::vector<std::size_t> statement_boundaries(std::string_view code) {
  const auto lx = significant(code);
  std::vector<std::size_t> cuts;
  bool braced = false;
  for (const auto& l : lx) {
    if (l.kind != Kind::Punct) continue;
    const auto t = text(code, l);
    if (t == "{" && l.brace_depth == 0) {
      braced = true;
      cuts.push_back(l.span.end);
    } else if (t == ";" && l.brace_depth == 1 && l.paren_depth == 0) {
      cuts.push_back(l.span.end);
    }
  }
  if (braced) return cuts;

  // Brace-less code: any line end after the first line, outside parentheses.
  std::size_t li = 0;
  int depth = 0;
  for (std::size_t i = 0; i + 1 < code.size(); ++i) {
    while (li < lx.size() && lx[li].span.end <= i) {
      depth = lx[li].paren_depth + (is_punct(code, lx[li], "(") ? 1 : 0);
      ++li;
    }
    if (code[i] == '\n' && depth == 0 && i > 0) cuts.push_back(i + 1);
  }
  return cuts;
}

}  // namespace codepurify::lexical
