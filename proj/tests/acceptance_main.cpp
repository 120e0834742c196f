// Desk-scale acceptance run. One PASS/FAIL line per criterion; the exit
// status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "codepurify/attacks.hpp"
#include "codepurify/detector.hpp"
#include "codepurify/pipeline.hpp"
#include "codepurify/report.hpp"
#include "codepurify/sweep.hpp"
#include "codepurify/synthetic.hpp"
#include "oracle.hpp"

namespace fs = std::filesystem;
using namespace codepurify;

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// Scenario seeds: clean corpus, suspect pool, attack.
constexpr std::uint64_t kCleanSeed = 11;
constexpr std::uint64_t kSuspectSeed = 12;
constexpr std::uint64_t kAttackSeed = 3;
constexpr std::size_t kCorpusSize = 2000;
constexpr std::size_t kTopK = 10;
constexpr int kOrder = 4;

constexpr double kFprBadCode = 0.15;
constexpr double kFprBnc = 0.20;
constexpr double kFprCodePoisoner = 0.30;
constexpr double kMaxSeconds = 60.0;
constexpr double kProbeTolerance = 1e-9;
constexpr double kMassTolerance = 1e-9;
constexpr double kBootstrapConfidence = 0.99;
constexpr std::size_t kBootstrapRounds = 4000;

int failures = 0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

const Dataset& clean_corpus() {
  static const Dataset d = generate_corpus({kCorpusSize, kCleanSeed, "clean"});
  return d;
}

const Dataset& suspect_pool() {
  static const Dataset d = generate_corpus({kCorpusSize, kSuspectSeed, "suspect"});
  return d;
}

Scenario scenario(AttackStrategy strategy, double rate = 0.01) {
  Scenario s;
  s.clean = clean_corpus();
  s.base = suspect_pool();
  s.attack.strategy = strategy;
  s.attack.rate = rate;
  s.attack.seed = kAttackSeed;
  return s;
}

PipelineConfig config(TokenizerMode mode = TokenizerMode::Fine, std::size_t k = kTopK) {
  PipelineConfig c;
  c.train.order = kOrder;
  c.train.tokenizer_mode = mode;
  c.detector.k = k;
  return c;
}

std::string outcome_text(const DetectionOutcome& o) { return "recall=" + fmt(o.recall) + " fpr=" + fmt(o.fpr); }

bool injected_in_top_k(const ScenarioResult& r) {
  std::set<std::string> injected;
  for (const auto& rec : r.poison.records) injected.insert(rec.injected_tokens.begin(), rec.injected_tokens.end());
  const auto& sel = r.pipeline.report.selected;
  return std::any_of(sel.begin(), sel.end(), [&](const std::string& t) { return injected.contains(t); });
}

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_scenario(scenario(AttackStrategy::BadCodeFixed), config());
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto& o = r.pipeline.outcome;
  verdict(1, o.recall == 1.0 && o.fpr <= kFprBadCode && seconds <= kMaxSeconds,
          "badcode-fixed " + outcome_text(o) + " seconds=" + fmt(seconds));
}

void criterion_2() {
  bool pass = true;
  std::string detail;
  for (auto strategy : {AttackStrategy::BncFixed, AttackStrategy::BncGrammar}) {
    const auto r = run_scenario(scenario(strategy), config());
    const auto& o = r.pipeline.outcome;
    const bool hit = injected_in_top_k(r);
    pass = pass && o.recall == 1.0 && hit && o.fpr <= kFprBnc;
    detail += std::string(to_string(strategy)) + " " + outcome_text(o) + " injected_in_top_k=" + (hit ? "yes" : "no") +
              " top=" + (r.pipeline.report.selected.empty() ? "-" : r.pipeline.report.selected.front()) + "; ";
  }
  verdict(2, pass, detail);
}

void criterion_3() {
  const auto r = run_scenario(scenario(AttackStrategy::CodePoisonerVariable), config());
  const auto& o = r.pipeline.outcome;
  verdict(3, o.recall == 1.0 && o.fpr <= kFprCodePoisoner, "codepoisoner-variable " + outcome_text(o));
}

void criterion_4() {
  Rng rng(404);
  std::size_t mismatches = 0;
  constexpr int kDatasets = 100;
  for (int i = 0; i < kDatasets; ++i) {
    const Dataset train = oracle::micro_dataset(rng, 10, 30, "t");
    const Dataset suspect = oracle::micro_dataset(rng, 10, 30, "s");
    TrainOptions opts;
    opts.order = 2 + static_cast<int>(rng.below(3));
    const auto model = NGramModel::train(train, opts);
    DetectorConfig dc;
    dc.k = 1 + rng.below(6);
    const auto fast = identify_triggers(model, suspect, dc);
    const auto slow = oracle::brute_force_triggers(model, suspect, dc.k);
    if (fast.entries != slow.entries || fast.selected != slow.selected || fast.flagged_ids != slow.flagged_ids) {
      ++mismatches;
    }
  }
  verdict(4, mismatches == 0,
          std::to_string(kDatasets) + " micro-datasets, mismatches=" + std::to_string(mismatches));
}

const NGramModel& desk_model() {
  static const NGramModel m = [] {
    TrainOptions opts;
    opts.order = kOrder;
    return NGramModel::train(clean_corpus(), opts);
  }();
  return m;
}

void criterion_5() {
  const auto& model = desk_model();
  const Tokenizer tok = model.make_tokenizer();
  Rng rng(505);
  constexpr int kProbes = 10000;
  double worst = 0.0;
  for (int p = 0; p < kProbes; ++p) {
    std::vector<TokenId> ids;
    if (p % 2 == 0) {
      const auto& sample = rng.pick(suspect_pool().samples);
      ids = model.encode(tok.tokenize(sample.code));
    } else {
      const auto ids_all = model.predictable_ids();
      const std::size_t len = 2 + rng.below(40);
      for (std::size_t i = 0; i < len; ++i) ids.push_back(rng.pick(ids_all));
    }
    if (ids.size() < 2) continue;
    const std::size_t t = rng.below(ids.size());
    for (auto mode : {EntropyMode::Total, EntropyMode::PerToken}) {
      const auto windowed = deletion_entropies(model, ids, mode);
      const auto full = model.cross_entropy(oracle::without(ids, t), mode);
      worst = std::max(worst, std::abs(windowed.deleted[t] - full.value));
    }
  }
  verdict(5, worst <= kProbeTolerance, std::to_string(kProbes) + " probes, max |diff|=" + sci(worst));
}

void criterion_6() {
  const auto& model = desk_model();
  const Tokenizer tok = model.make_tokenizer();
  const auto ids_all = model.predictable_ids();
  Rng rng(606);
  constexpr int kContexts = 1000;
  const std::size_t history = static_cast<std::size_t>(model.order() - 1);
  double worst = 0.0;
  for (int c = 0; c < kContexts; ++c) {
    std::vector<TokenId> context;
    if (c % 2 == 0) {
      // Observed history from a training snippet.
      const auto padded = model.pad(model.encode(tok.tokenize(rng.pick(clean_corpus().samples).code)));
      const std::size_t j = history + rng.below(padded.size() - history);
      context.assign(padded.begin() + static_cast<std::ptrdiff_t>(j - history),
                     padded.begin() + static_cast<std::ptrdiff_t>(j));
    } else {
      for (std::size_t i = 0; i < history; ++i) context.push_back(rng.chance(0.1) ? kStartId : rng.pick(ids_all));
    }
    worst = std::max(worst, std::abs(oracle::probability_mass(model, context) - 1.0));
  }
  verdict(6, worst <= kMassTolerance, std::to_string(kContexts) + " contexts, max |sum-1|=" + sci(worst));
}

// Fraction of bootstrap resamples in which the poisoned mean exceeds the clean mean.
double bootstrap_support(const std::vector<double>& poisoned, const std::vector<double>& clean, Rng& rng) {
  std::size_t wins = 0;
  for (std::size_t b = 0; b < kBootstrapRounds; ++b) {
    double p = 0.0;
    double c = 0.0;
    for (std::size_t i = 0; i < poisoned.size(); ++i) p += rng.pick(poisoned);
    for (std::size_t i = 0; i < clean.size(); ++i) c += rng.pick(clean);
    if (p / static_cast<double>(poisoned.size()) > c / static_cast<double>(clean.size())) ++wins;
  }
  return static_cast<double>(wins) / static_cast<double>(kBootstrapRounds);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void criterion_7() {
  const auto& model = desk_model();
  const Tokenizer tok = model.make_tokenizer();
  Rng rng(707);
  bool pass = true;
  std::string detail;
  for (auto strategy : {AttackStrategy::BadCodeFixed, AttackStrategy::BncFixed}) {
    AttackConfig ac = scenario(strategy).attack;
    const auto poisoned = poison(suspect_pool(), ac);
    std::vector<double> pe;
    std::vector<double> ce;
    for (const auto& s : poisoned.poisoned.samples) {
      const double e = model.cross_entropy(tok.tokenize(s.code)).value;
      (s.poisoned.value_or(false) ? pe : ce).push_back(e);
    }
    const double support = bootstrap_support(pe, ce, rng);
    const bool ok = mean(pe) > mean(ce) && support >= kBootstrapConfidence;
    pass = pass && ok;
    detail += std::string(to_string(strategy)) + " poisoned=" + fmt(mean(pe)) + " clean=" + fmt(mean(ce)) +
              " confidence=" + fmt(support) + "; ";
  }
  verdict(7, pass, detail);
}

bool non_decreasing(const std::vector<SweepRow>& rows, double DetectionOutcome::*field) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].outcome.*field < rows[i - 1].outcome.*field) return false;
  }
  return true;
}

bool any_failed(const std::vector<SweepRow>& rows) {
  return std::any_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.failed; });
}

std::string column(const std::vector<SweepRow>& rows, double DetectionOutcome::*field) {
  std::string out;
  for (const auto& r : rows) out += (out.empty() ? "" : ",") + (r.failed ? std::string("failed") : fmt(r.outcome.*field));
  return out;
}

void criterion_8() {
  const Scenario base = scenario(AttackStrategy::BadCodeFixed);
  SweepSpec ks{SweepAxis::K, {"5", "10", "15", "20", "25"}, config(), false};
  const auto k_rows = run_sweep(ks, base);
  SweepSpec sizes{SweepAxis::CleanSize, {"250", "500", "1000", "2000"}, config(), false};
  const auto size_rows = run_sweep(sizes, base);
  SweepSpec rates{SweepAxis::Rate, {"1%", "2%", "3%", "5%", "10%", "50%"}, config(), false};
  const auto rate_rows = run_sweep(rates, base);

  const bool k_ok = !any_failed(k_rows) && non_decreasing(k_rows, &DetectionOutcome::recall) &&
                    non_decreasing(k_rows, &DetectionOutcome::fpr);
  const bool size_ok = !any_failed(size_rows) && non_decreasing(size_rows, &DetectionOutcome::recall);
  const bool rate_ok = !any_failed(rate_rows) && std::all_of(rate_rows.begin(), rate_rows.end(),
                                                              [](const SweepRow& r) { return r.outcome.recall == 1.0; });
  verdict(8, k_ok && size_ok && rate_ok,
          "k recall=" + column(k_rows, &DetectionOutcome::recall) + " k fpr=" + column(k_rows, &DetectionOutcome::fpr) +
              "; clean-size recall=" + column(size_rows, &DetectionOutcome::recall) +
              "; rate recall=" + column(rate_rows, &DetectionOutcome::recall));
}

void criterion_9() {
  const Scenario s = scenario(AttackStrategy::BadCodeFixed);
  const auto fine = run_scenario(s, config(TokenizerMode::Fine));
  const auto coarse = run_scenario(s, config(TokenizerMode::Coarse));
  const double rf = fine.pipeline.outcome.recall;
  const double rc = coarse.pipeline.outcome.recall;
  verdict(9, rf > rc, "fine recall=" + fmt(rf) + " coarse recall=" + fmt(rc));
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes the model, report and purified set of one run and returns their bytes.
std::vector<std::string> run_artifacts(const fs::path& dir, unsigned threads) {
  fs::create_directories(dir);
  PipelineConfig c = config();
  c.detector.threads = threads;
  const auto r = run_scenario(scenario(AttackStrategy::BadCodeFixed), c);
  r.pipeline.model.save(dir / "model.bin");
  save_report(r.pipeline.report, dir / "report.json");
  save_dataset(r.pipeline.purified.clean, dir / "purified.jsonl");
  return {read_file(dir / "model.bin"), read_file(dir / "report.json"), read_file(dir / "purified.jsonl")};
}

void criterion_10() {
  const fs::path root = fs::temp_directory_path() / ("codepurify-acceptance-" + std::to_string(::getpid()));
  const auto a = run_artifacts(root / "a", 0);
  const auto b = run_artifacts(root / "b", 0);
  const auto c = run_artifacts(root / "c", 1);
  fs::remove_all(root);
  bool same = true;
  std::string detail;
  const char* names[] = {"model", "report", "purified"};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const bool eq = !a[i].empty() && a[i] == b[i] && a[i] == c[i];
    same = same && eq;
    std::ostringstream h;
    h << std::hex << std::hash<std::string>{}(a[i]);
    detail += std::string(names[i]) + "=" + h.str() + (eq ? "" : "(differs)") + " ";
  }
  verdict(10, same, detail);
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria = {criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      verdict(static_cast<int>(i + 1), false, std::string("error: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
