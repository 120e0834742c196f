#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "codepurify/attacks.hpp"
#include "codepurify/detector.hpp"
#include "codepurify/error.hpp"
#include "codepurify/pipeline.hpp"
#include "codepurify/random.hpp"
#include "codepurify/report.hpp"
#include "codepurify/synthetic.hpp"
#include "doctest.h"
#include "oracle.hpp"

using namespace codepurify;

namespace {

bool same_report(const TriggerReport& a, const TriggerReport& b) {
  return a.entries == b.entries && a.selected == b.selected && a.flagged_ids == b.flagged_ids;
}

std::set<std::string> as_set(const std::vector<std::string>& v) { return {v.begin(), v.end()}; }

const Dataset& clean_small() {
  static const Dataset d = generate_corpus({400, 31, "c"});
  return d;
}

const NGramModel& small_model() {
  static const NGramModel m = NGramModel::train(clean_small());
  return m;
}

const Dataset& suspect_small() {
  static const Dataset d = [] {
    AttackConfig ac;
    ac.rate = 0.05;
    ac.seed = 2;
    return poison(generate_corpus({200, 32, "s"}), ac).poisoned;
  }();
  return d;
}

}  // namespace

TEST_CASE("detector equals the brute-force oracle on micro datasets") {
  Rng rng(12);
  for (int i = 0; i < 60; ++i) {
    const Dataset train = oracle::micro_dataset(rng, 10, 30, "t");
    const Dataset suspect = oracle::micro_dataset(rng, 10, 30, "s");
    TrainOptions opts;
    opts.order = 1 + static_cast<int>(rng.below(4));
    opts.discount = 0.2 + 0.6 * rng.unit();
    const auto model = NGramModel::train(train, opts);
    for (auto mode : {EntropyMode::PerToken, EntropyMode::Total}) {
      DetectorConfig dc;
      dc.k = rng.below(6);
      dc.entropy_mode = mode;
      CHECK(same_report(identify_triggers(model, suspect, dc), oracle::brute_force_triggers(model, suspect, dc.k, mode)));
    }
  }
}

TEST_CASE("windowed deletion entropies equal full rescoring") {
  const auto& m = small_model();
  const Tokenizer tok = m.make_tokenizer();
  for (std::size_t s = 0; s < 50; ++s) {
    const auto ids = m.encode(tok.tokenize(suspect_small().samples[s].code));
    for (auto mode : {EntropyMode::PerToken, EntropyMode::Total}) {
      const auto d = deletion_entropies(m, ids, mode);
      CHECK(d.original.total_ticks == m.cross_entropy(ids, mode).total_ticks);
      for (std::size_t t = 0; t < ids.size(); ++t) {
        const auto full = m.cross_entropy(oracle::without(ids, t), mode);
        CHECK(d.deleted_ticks[t] == full.total_ticks);
        CHECK(d.deleted[t] == full.value);
      }
    }
  }
}

TEST_CASE("every reported delta is positive") {
  const auto& m = small_model();
  const Tokenizer tok = m.make_tokenizer();
  for (const auto& s : suspect_small().samples) {
    for (const auto& d : score_sample(m, tok.tokenize(s.code, s.id))) {
      CHECK(d.delta > 0.0);
      CHECK(d.delta_ticks > 0);
      CHECK(d.sample_id == s.id);
    }
  }
  for (const auto& e : identify_triggers(m, suspect_small()).entries) {
    CHECK(e.cumulative_delta > 0.0);
    CHECK(e.support >= 1);
  }
}

TEST_CASE("injected rb deletion lowers entropy") {
  const auto& m = small_model();
  const Tokenizer tok = m.make_tokenizer();
  const std::string base = clean_small().samples[0].code;
  Rng rng(1);
  const auto mutation = append_trigger(base, "rb", rng);
  REQUIRE(mutation.has_value());
  const auto dels = score_sample(m, tok.tokenize(mutation->code));
  CHECK(std::any_of(dels.begin(), dels.end(), [](const ScoredDeletion& d) { return d.token.text == "rb"; }));
}

TEST_CASE("token Q inserted into two of three samples ranks first") {
  const auto model = NGramModel::train(clean_small());
  Dataset toy;
  Rng rng(44);
  for (int i = 0; i < 3; ++i) {
    auto seq = model.make_tokenizer().tokenize(clean_small().samples[static_cast<std::size_t>(i) + 10].code).texts();
    if (i < 2) seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(rng.below(seq.size() + 1)), "Q");
    std::string code;
    for (const auto& t : seq) code += t + " ";
    toy.samples.push_back({"toy" + std::to_string(i), code, {}, {}, {}});
  }
  const auto report = identify_triggers(model, toy, DetectorConfig{});
  REQUIRE(!report.entries.empty());
  CHECK(report.entries.front().token == "Q");
  CHECK(report.entries.front().support == 2);
  CHECK(same_report(report, oracle::brute_force_triggers(model, toy, kDefaultTopK)));
}

TEST_CASE("k = 0 selects nothing and purification keeps everything") {
  DetectorConfig dc;
  dc.k = 0;
  const auto report = identify_triggers(small_model(), suspect_small(), dc);
  CHECK(report.selected.empty());
  CHECK(report.flagged_ids.empty());
  const auto out = purify(suspect_small(), report, small_model().make_tokenizer());
  CHECK(out.clean == suspect_small());
  CHECK(out.removed.empty());
}

TEST_CASE("report does not depend on sample order or thread count") {
  const auto base = identify_triggers(small_model(), suspect_small());
  Dataset shuffled = suspect_small();
  Rng rng(3);
  rng.shuffle(std::span<CodeSample>(shuffled.samples));
  for (unsigned threads : {1u, 2u, 7u}) {
    DetectorConfig dc;
    dc.threads = threads;
    const auto r = identify_triggers(small_model(), shuffled, dc);
    CHECK(r.entries == base.entries);
    CHECK(r.selected == base.selected);
    CHECK(as_set(r.flagged_ids) == as_set(base.flagged_ids));
  }
}

TEST_CASE("entries are sorted by delta then token text") {
  const auto r = identify_triggers(small_model(), suspect_small());
  for (std::size_t i = 1; i < r.entries.size(); ++i) {
    const auto& a = r.entries[i - 1];
    const auto& b = r.entries[i];
    CHECK((a.cumulative_ticks > b.cumulative_ticks || (a.cumulative_ticks == b.cumulative_ticks && a.token < b.token)));
  }
  REQUIRE(r.selected.size() == kDefaultTopK);
  for (std::size_t i = 0; i < r.selected.size(); ++i) CHECK(r.selected[i] == r.entries[i].token);
}

TEST_CASE("selection and flagging grow with k") {
  std::vector<std::string> prev_sel;
  std::set<std::string> prev_flag;
  for (std::size_t k = 0; k <= 30; k += 3) {
    DetectorConfig dc;
    dc.k = k;
    const auto r = identify_triggers(small_model(), suspect_small(), dc);
    const auto sel = as_set(r.selected);
    const auto flag = as_set(r.flagged_ids);
    CHECK(std::includes(sel.begin(), sel.end(), prev_sel.begin(), prev_sel.end()));
    CHECK(std::includes(flag.begin(), flag.end(), prev_flag.begin(), prev_flag.end()));
    prev_sel.assign(sel.begin(), sel.end());
    prev_flag = flag;
  }
}

TEST_CASE("k beyond the scored tokens selects all with a warning") {
  DetectorConfig dc;
  dc.k = 1000000;
  const auto r = identify_triggers(small_model(), suspect_small(), dc);
  CHECK(r.selected.size() == r.entries.size());
  CHECK_FALSE(r.warnings.empty());
}

TEST_CASE("purification partitions the suspect set") {
  const auto& m = small_model();
  const auto report = identify_triggers(m, suspect_small());
  const auto out = purify(suspect_small(), report, m.make_tokenizer());
  CHECK(out.clean.size() + out.removed.size() == suspect_small().size());
  std::set<std::string> ids;
  for (const auto& s : out.clean.samples) ids.insert(s.id);
  for (const auto& s : out.removed.samples) CHECK(ids.insert(s.id).second);
  CHECK(ids.size() == suspect_small().size());
  std::vector<std::string> removed;
  for (const auto& s : out.removed.samples) removed.push_back(s.id);
  CHECK(removed == report.flagged_ids);
}

TEST_CASE("purification rejects a tokenizer mode mismatch") {
  const auto report = identify_triggers(small_model(), suspect_small());
  CHECK_THROWS_AS(purify(suspect_small(), report, Tokenizer(TokenizerMode::Coarse)), ConfigError);
}

TEST_CASE("long samples are truncated with a warning") {
  const auto& m = small_model();
  const auto seq = m.make_tokenizer().tokenize(suspect_small().samples[0].code, "long");
  DetectorConfig dc;
  dc.max_seq_len = 5;
  std::vector<std::string> warnings;
  for (const auto& d : score_sample(m, seq, dc, &warnings)) CHECK(d.position < 5);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("long") != std::string::npos);
  dc.max_seq_len = 2;
  CHECK_THROWS_AS(score_sample(m, seq, dc), ConfigError);
  CHECK_THROWS_AS(score_sample(m, TokenSequence{}), ModelError);
  CHECK_THROWS_AS(identify_triggers(m, Dataset{}), DatasetError);
}

// Holds at desk scale only: with a 400-snippet model single clean
// deletions already overlap the trigger's, and only accumulation separates them.
TEST_CASE("in-distribution deletions never beat the injected trigger") {
  const auto m = NGramModel::train(generate_corpus({2000, 11, "clean"}));
  const Tokenizer tok = m.make_tokenizer();
  AttackConfig ac;
  ac.seed = 3;
  const auto suspect = poison(generate_corpus({2000, 12, "suspect"}), ac).poisoned;
  double trigger_max = 0.0;
  double clean_max = 0.0;
  std::size_t in_distribution = 0;
  for (const auto& s : suspect.samples) {
    const auto seq = tok.tokenize(s.code);
    const auto dels = score_sample(m, seq);
    if (s.poisoned.value_or(false)) {
      for (const auto& d : dels) {
        if (d.token.text == "rb") trigger_max = std::max(trigger_max, d.delta);
      }
      continue;
    }
    const auto ids = m.encode(seq);
    if (std::find(ids.begin(), ids.end(), kUnknownId) != ids.end()) continue;
    ++in_distribution;
    for (const auto& d : dels) clean_max = std::max(clean_max, d.delta);
  }
  REQUIRE(in_distribution > 20);
  CHECK(trigger_max > 0.0);
  CHECK(clean_max < trigger_max);
}

TEST_CASE("onion suspicion is the signed deletion delta") {
  const auto& m = small_model();
  const Tokenizer tok = m.make_tokenizer();
  for (std::size_t i = 0; i < 30; ++i) {
    const auto seq = tok.tokenize(suspect_small().samples[i].code);
    const auto onion = onion_baseline_score(m, seq);
    const auto dels = score_sample(m, seq);
    REQUIRE(onion.size() == seq.size());
    std::size_t positive = 0;
    for (const auto& o : onion) {
      CHECK(o.flagged == (o.suspicion > 0.0));
      if (o.flagged) ++positive;
    }
    CHECK(positive == dels.size());
    for (const auto& d : dels) CHECK(onion[d.position].suspicion == d.delta);
  }
}

TEST_CASE("onion threshold misfires on a grammar trigger") {
  const auto& m = small_model();
  const Tokenizer tok = m.make_tokenizer();
  Rng rng(6);
  std::size_t clean_flagged = 0;
  std::size_t trigger_unflagged = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto mutation =
        insert_dead_code(clean_small().samples[i].code, "if (Math.sin(0.52) == -28) print(\"alert\");", rng);
    REQUIRE(mutation.has_value());
    for (const auto& o : onion_baseline_score(m, tok.tokenize(mutation->code))) {
      const bool inside = o.token.span.begin >= mutation->injection_site.begin &&
                          o.token.span.end <= mutation->injection_site.end;
      if (inside && !o.flagged) ++trigger_unflagged;
      if (!inside && o.flagged) ++clean_flagged;
    }
  }
  CHECK(clean_flagged > 0);
  CHECK(trigger_unflagged > 0);
}

TEST_CASE("rb is selected on a desk-style scenario") {
  const auto r = run_scenario(desk_scenario(AttackStrategy::BadCodeFixed, 1000, 1000, 9));
  const auto& sel = r.pipeline.report.selected;
  CHECK(std::find(sel.begin(), sel.end(), "rb") != sel.end());
  CHECK(r.pipeline.outcome.recall == 1.0);
}

TEST_CASE("report document round trip") {
  DetectorConfig dc;
  dc.k = 4;
  const auto r = identify_triggers(small_model(), suspect_small(), dc);
  const auto doc = report_to_json(r);
  CHECK(doc["config"]["n"] == 4);
  CHECK(doc["config"]["k"] == 4);
  CHECK(doc["config"]["entropy_mode"] == "per-token");
  CHECK(doc["config"]["tokenizer_mode"] == "fine");
  const auto back = report_from_json(doc);
  CHECK(back.entries == r.entries);
  CHECK(back.selected == r.selected);
  CHECK(back.flagged_ids == r.flagged_ids);
  CHECK(report_to_json(back).dump() == doc.dump());
  const std::string table = format_report_table(r, 4);
  for (const auto& t : r.selected) CHECK(table.find(t) != std::string::npos);
}
