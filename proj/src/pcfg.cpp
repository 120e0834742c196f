#include "codepurify/pcfg.hpp"

#include <cmath>
#include <cstdio>
#include <set>

#include "codepurify/error.hpp"

namespace codepurify {
namespace {

constexpr std::string_view kFloat = "FLOAT";
constexpr std::string_view kInt = "INT";
constexpr int kMaxDepth = 64;

// Returns the referenced name for `<NAME>` symbols, empty otherwise.
std::string_view reference(std::string_view symbol) {
  if (symbol.size() < 3 || symbol.front() != '<' || symbol.back() != '>') return {};
  const auto name = symbol.substr(1, symbol.size() - 2);
  for (char c : name) {
    if (!((c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_')) return {};
  }
  return name;
}

Production prod(std::vector<std::string> symbols, double p) { return Production{std::move(symbols), p}; }

std::vector<Production> uniform(const std::vector<std::string>& literals) {
  std::vector<Production> out;
  for (const auto& l : literals) out.push_back(prod({l}, 1.0 / static_cast<double>(literals.size())));
  return out;
}

void expand(const Grammar& g, std::string_view symbol, Rng& rng, std::string& out, int depth) {
  if (depth > kMaxDepth) throw ConfigError("grammar expansion exceeded depth " + std::to_string(kMaxDepth));
  const auto name = reference(symbol);
  if (name.empty()) {
    out += symbol;
    return;
  }
  if (name == kFloat) {
    const double v = g.float_min + rng.unit() * (g.float_max - g.float_min);
    // Truncate rather than round so the printed value stays below float_max.
    const double scale = std::pow(10.0, g.float_decimals);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", g.float_decimals, std::floor(v * scale) / scale);
    out += buf;
    return;
  }
  if (name == kInt) {
    out += std::to_string(rng.between(g.int_min, g.int_max));
    return;
  }
  const auto& productions = g.rules.at(std::string(name));
  double u = rng.unit();
  const Production* chosen = &productions.back();
  for (const auto& p : productions) {
    if (u < p.probability) {
      chosen = &p;
      break;
    }
    u -= p.probability;
  }
  for (const auto& s : chosen->symbols) expand(g, s, rng, out, depth + 1);
}

class Recognizer {
 public:
  Recognizer(const Grammar& g, std::string_view text) : g_(g), text_(text) {}

  std::set<std::size_t> symbol(std::string_view sym, std::size_t pos) {
    const auto name = reference(sym);
    if (name.empty()) {
      if (text_.substr(pos).starts_with(sym)) return {pos + sym.size()};
      return {};
    }
    if (name == kFloat) return match_float(pos);
    if (name == kInt) return match_int(pos);

    const auto key = std::make_pair(std::string(name), pos);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    if (!active_.insert(key).second) return {};
    std::set<std::size_t> ends;
    for (const auto& p : g_.rules.at(std::string(name))) {
      std::set<std::size_t> frontier{pos};
      for (const auto& s : p.symbols) {
        std::set<std::size_t> next;
        for (auto f : frontier) {
          auto e = symbol(s, f);
          next.insert(e.begin(), e.end());
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
      }
      ends.insert(frontier.begin(), frontier.end());
    }
    active_.erase(key);
    memo_[key] = ends;
    return ends;
  }

 private:
  std::size_t digits(std::size_t pos) const {
    std::size_t i = pos;
    while (i < text_.size() && text_[i] >= '0' && text_[i] <= '9') ++i;
    return i - pos;
  }

  std::set<std::size_t> match_float(std::size_t pos) const {
    std::size_t i = pos;
    if (i < text_.size() && text_[i] == '-') ++i;
    const std::size_t whole = digits(i);
    if (whole == 0) return {};
    i += whole;
    if (g_.float_decimals > 0) {
      if (i >= text_.size() || text_[i] != '.') return {};
      ++i;
      if (digits(i) < static_cast<std::size_t>(g_.float_decimals)) return {};
      i += static_cast<std::size_t>(g_.float_decimals);
    }
    const double v = std::stod(std::string(text_.substr(pos, i - pos)));
    if (v < g_.float_min || v >= g_.float_max) return {};
    return {i};
  }

  std::set<std::size_t> match_int(std::size_t pos) const {
    std::set<std::size_t> ends;
    std::size_t i = pos;
    if (i < text_.size() && text_[i] == '-') ++i;
    const std::size_t n = digits(i);
    for (std::size_t len = 1; len <= n && len <= 18; ++len) {
      const auto v = std::stoll(std::string(text_.substr(pos, i - pos + len)));
      if (v >= g_.int_min && v <= g_.int_max) ends.insert(i + len);
    }
    return ends;
  }

  const Grammar& g_;
  std::string_view text_;
  std::map<std::pair<std::string, std::size_t>, std::set<std::size_t>> memo_;
  std::set<std::pair<std::string, std::size_t>> active_;
};

}  // namespace

Grammar default_dead_code_grammar() {
  Grammar g;
  g.start = "STMT";
  g.rules["STMT"] = {prod({"if (", "<CALL>", " ", "<CMP>", " ", "<INT>", ") ", "<ACTION>", ";"}, 1.0)};
  g.rules["CALL"] = {prod({"<NS>", "<FN>", "(", "<ARG>", ")"}, 1.0)};
  g.rules["NS"] = {prod({""}, 0.5), prod({"Math."}, 0.5)};
  g.rules["FN"] = uniform({"sin", "cos", "exp", "sqrt", "rand"});
  g.rules["ARG"] = {prod({"<FLOAT>"}, 1.0)};
  g.rules["CMP"] = uniform({"<", ">", "<=", ">=", "=="});
  g.rules["ACTION"] = {prod({"print(\"", "<MSG>", "\")"}, 1.0 / 3.0),
                       prod({"println(\"", "<MSG>", "\")"}, 1.0 / 3.0),
                       prod({"throw new Exception(\"", "<MSG>", "\")"}, 1.0 / 3.0)};
  g.rules["MSG"] = uniform({"exception", "alert", "fail", "error", "warning", "abort", "crash", "panic"});
  return g;
}

void validate_grammar(const Grammar& grammar) {
  if (!grammar.rules.contains(grammar.start)) throw ConfigError("grammar start symbol " + grammar.start + " is undefined");
  if (grammar.float_decimals < 0 || grammar.float_decimals > 12) throw ConfigError("grammar float_decimals out of range");
  if (!(grammar.float_min < grammar.float_max)) throw ConfigError("grammar float range is empty");
  if (grammar.int_min > grammar.int_max) throw ConfigError("grammar int range is empty");
  for (const auto& [name, productions] : grammar.rules) {
    if (name == kFloat || name == kInt) throw ConfigError("grammar redefines built-in terminal " + name);
    if (productions.empty()) throw ConfigError("nonterminal " + name + " has no productions");
    double sum = 0.0;
    for (const auto& p : productions) {
      if (!(p.probability >= 0.0)) throw ConfigError("nonterminal " + name + " has a negative probability");
      sum += p.probability;
      for (const auto& s : p.symbols) {
        const auto ref = reference(s);
        if (!ref.empty() && ref != kFloat && ref != kInt && !grammar.rules.contains(std::string(ref))) {
          throw ConfigError("nonterminal " + name + " references undefined " + std::string(s));
        }
      }
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw ConfigError("probabilities of nonterminal " + name + " sum to " + std::to_string(sum) + ", not 1");
    }
  }
}

std::string generate(const Grammar& grammar, Rng& rng) {
  validate_grammar(grammar);
  std::string out;
  expand(grammar, "<" + grammar.start + ">", rng, out, 0);
  return out;
}

std::string gen_dead_code(const Grammar& grammar, std::uint64_t seed) {
  Rng rng(seed);
  return generate(grammar, rng);
}

bool derives(const Grammar& grammar, std::string_view text) {
  validate_grammar(grammar);
  Recognizer r(grammar, text);
  return r.symbol("<" + grammar.start + ">", 0).contains(text.size());
}

nlohmann::ordered_json grammar_to_json(const Grammar& grammar) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::object();
  doc["start"] = grammar.start;
  doc["float_range"] = {grammar.float_min, grammar.float_max};
  doc["float_decimals"] = grammar.float_decimals;
  doc["int_range"] = {grammar.int_min, grammar.int_max};
  auto& rules = doc["rules"] = nlohmann::ordered_json::object();
  for (const auto& [name, productions] : grammar.rules) {
    auto& list = rules[name] = nlohmann::ordered_json::array();
    for (const auto& p : productions) list.push_back({{"p", p.probability}, {"rhs", p.symbols}});
  }
  return doc;
}

Grammar grammar_from_json(const nlohmann::ordered_json& doc) {
  Grammar g;
  try {
    g.start = doc.at("start").get<std::string>();
    if (doc.contains("float_range")) {
      g.float_min = doc["float_range"].at(0).get<double>();
      g.float_max = doc["float_range"].at(1).get<double>();
    }
    if (doc.contains("float_decimals")) g.float_decimals = doc["float_decimals"].get<int>();
    if (doc.contains("int_range")) {
      g.int_min = doc["int_range"].at(0).get<std::int64_t>();
      g.int_max = doc["int_range"].at(1).get<std::int64_t>();
    }
    for (const auto& [name, list] : doc.at("rules").items()) {
      auto& productions = g.rules[name];
      for (const auto& p : list) {
        productions.push_back(Production{p.at("rhs").get<std::vector<std::string>>(), p.at("p").get<double>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed grammar document: ") + e.what());
  }
  validate_grammar(g);
  return g;
}

}  // namespace codepurify
