#include "codepurify/cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "codepurify/attacks.hpp"
#include "codepurify/dataset.hpp"
#include "codepurify/detector.hpp"
#include "codepurify/error.hpp"
#include "codepurify/metrics.hpp"
#include "codepurify/ngram_model.hpp"
#include "codepurify/pipeline.hpp"
#include "codepurify/report.hpp"
#include "codepurify/sweep.hpp"
#include "codepurify/synthetic.hpp"

namespace codepurify {
namespace {

namespace fs = std::filesystem;

struct Shared {
  int n = kDefaultOrder;
  std::size_t k = kDefaultTopK;
  double discount = kDefaultDiscount;
  std::string tokenizer;  // empty = default (train) or the model's mode (scan)
  std::uint64_t seed = 0;
  std::string entropy_mode = "per-token";
  unsigned threads = 0;
};

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot open " + path.string() + " for writing");
  f << bytes;
  if (!f.flush()) throw Error("failed writing " + path.string());
}

std::vector<std::string> read_id_list(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(f, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TrainOptions train_options(const Shared& s) {
  TrainOptions o;
  o.order = s.n;
  o.discount = s.discount;
  o.tokenizer_mode = s.tokenizer.empty() ? TokenizerMode::Fine : parse_tokenizer_mode(s.tokenizer);
  return o;
}

DetectorConfig detector_config(const Shared& s) {
  DetectorConfig c;
  c.k = s.k;
  c.entropy_mode = parse_entropy_mode(s.entropy_mode);
  c.threads = s.threads;
  return c;
}

void print_metrics(std::ostream& out, const DetectionOutcome& o) {
  out << std::fixed << std::setprecision(4) << "tp=" << o.tp << " fp=" << o.fp << " tn=" << o.tn << " fn=" << o.fn
      << "\nrecall=" << o.recall << " fpr=" << o.fpr << " precision=" << o.precision << " f1=" << o.f1 << '\n';
  out.unsetf(std::ios::floatfield);
}

void add_model_flags(CLI::App* cmd, Shared& s) {
  cmd->add_option("--n", s.n, "n-gram order")->check(CLI::Range(1, kMaxOrder));
  cmd->add_option("--discount", s.discount, "absolute discount in (0,1)");
  cmd->add_option("--tokenizer", s.tokenizer, "fine | coarse")->check(CLI::IsMember({"fine", "coarse"}));
}

void add_detector_flags(CLI::App* cmd, Shared& s) {
  cmd->add_option("--k", s.k, "number of trigger tokens to select");
  cmd->add_option("--entropy-mode", s.entropy_mode, "per-token | total")
      ->check(CLI::IsMember({"per-token", "total"}));
  cmd->add_option("--threads", s.threads, "scan threads (0 = all cores)");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Naturalness-based poisoned sample detection for code datasets", "codepurify"};
  app.require_subcommand(1);
  Shared s;

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic Java-style corpus");
  std::size_t synth_count = 2000;
  std::string synth_prefix = "s";
  fs::path synth_out;
  synth->add_option("--count", synth_count, "number of snippets")->check(CLI::PositiveNumber);
  synth->add_option("--prefix", synth_prefix, "id prefix");
  synth->add_option("--seed", s.seed, "generator seed");
  synth->add_option("-o,--out", synth_out, "output dataset")->required();

  // train
  auto* train = app.add_subcommand("train", "train the n-gram model on clean code");
  fs::path train_in, model_out;
  train->add_option("-i,--clean", train_in, "clean dataset")->required();
  train->add_option("-o,--model-out", model_out, "model file")->required();
  add_model_flags(train, s);

  // poison
  auto* poison_cmd = app.add_subcommand("poison", "simulate a poisoning attack");
  fs::path poison_in, poison_out, records_out;
  std::string attack = "badcode-fixed";
  double rate = 0.01;
  std::string fixed_token = "rb";
  std::optional<std::string> target_label;
  poison_cmd->add_option("-i,--input", poison_in, "clean dataset")->required();
  poison_cmd->add_option("-o,--out", poison_out, "poisoned dataset")->required();
  poison_cmd->add_option("--records-out", records_out, "poison record sidecar (default <out>.records.jsonl)");
  poison_cmd->add_option("--attack", attack, "badcode-fixed | badcode-mixed | bnc-fixed | bnc-grammar | "
                                             "codepoisoner-variable");
  poison_cmd->add_option("--rate", rate, "poisoning fraction");
  poison_cmd->add_option("--seed", s.seed, "attack seed");
  poison_cmd->add_option("--trigger", fixed_token, "badcode-fixed trigger token");
  poison_cmd->add_option("--target-label", target_label, "label assigned to poisoned samples");

  // scan
  auto* scan = app.add_subcommand("scan", "rank trigger tokens in a suspect dataset");
  fs::path scan_model, scan_in, report_out;
  std::size_t table_rows = 0;
  scan->add_option("-m,--model", scan_model, "model file")->required();
  scan->add_option("-i,--input", scan_in, "suspect dataset")->required();
  scan->add_option("-o,--report-out", report_out, "report file")->required();
  scan->add_option("--tokenizer", s.tokenizer, "expected tokenizer mode")->check(CLI::IsMember({"fine", "coarse"}));
  scan->add_option("--rows", table_rows, "console table rows (default k)");
  add_detector_flags(scan, s);

  // purify
  auto* purify_cmd = app.add_subcommand("purify", "drop samples containing selected triggers");
  fs::path purify_model, purify_in, purify_report, purify_out, removed_out;
  purify_cmd->add_option("-m,--model", purify_model, "model file used for the scan")->required();
  purify_cmd->add_option("-i,--input", purify_in, "suspect dataset")->required();
  purify_cmd->add_option("-r,--report", purify_report, "report file")->required();
  purify_cmd->add_option("-o,--out", purify_out, "purified dataset")->required();
  purify_cmd->add_option("--removed-out", removed_out, "removed samples");

  // eval
  auto* eval = app.add_subcommand("eval", "score flagged ids against ground truth");
  fs::path eval_in, eval_report, eval_flagged, eval_truth, eval_out;
  eval->add_option("-i,--input", eval_in, "suspect dataset")->required();
  auto* from_report = eval->add_option("-r,--report", eval_report, "report whose flagged_ids are scored");
  auto* from_list = eval->add_option("--flagged", eval_flagged, "file with one flagged id per line");
  from_report->excludes(from_list);
  eval->add_option("--truth", eval_truth, "poison record sidecar (default: poisoned flags in the dataset)");
  eval->add_option("-o,--out", eval_out, "metrics file");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "sensitivity sweep over one parameter");
  std::string axis = "k";
  std::vector<std::string> values;
  fs::path sweep_clean, sweep_base, sweep_out, sweep_json;
  std::size_t clean_size = 2000, suspect_size = 2000;
  bool parallel_points = false;
  sweep->add_option("--axis", axis, "n | k | clean_size | rate | tokenizer_mode | dataset_size");
  sweep->add_option("--values", values, "axis values")->required()->delimiter(',');
  sweep->add_option("--attack", attack, "attack strategy");
  sweep->add_option("--rate", rate, "poisoning fraction");
  sweep->add_option("--seed", s.seed, "scenario seed");
  sweep->add_option("--clean", sweep_clean, "clean dataset (default: synthetic)");
  sweep->add_option("--base", sweep_base, "unpoisoned suspect pool (default: synthetic)");
  sweep->add_option("--clean-size", clean_size, "synthetic clean snippets")->check(CLI::PositiveNumber);
  sweep->add_option("--suspect-size", suspect_size, "synthetic suspect snippets")->check(CLI::PositiveNumber);
  sweep->add_flag("--parallel-points", parallel_points, "run sweep points concurrently");
  sweep->add_option("-o,--out", sweep_out, "delimiter-separated table")->required();
  sweep->add_option("--json-out", sweep_json, "structured sweep result");
  add_model_flags(sweep, s);
  add_detector_flags(sweep, s);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, x;
    const int code = app.exit(e, o, x);
    out << o.str();
    err << x.str();
    return code;
  }

  try {
    if (*synth) {
      auto data = generate_corpus({synth_count, s.seed, synth_prefix});
      save_dataset(data, synth_out);
      out << "wrote " << data.size() << " snippets to " << synth_out.string() << '\n';
    } else if (*train) {
      auto clean = load_dataset(train_in);
      const auto t0 = std::chrono::steady_clock::now();
      auto model = NGramModel::train(clean, train_options(s));
      const double seconds = elapsed(t0);
      model.save(model_out);
      out << "trained order-" << model.order() << " model (" << to_string(model.tokenizer_mode())
          << " tokenizer) on " << clean.size() << " snippets\n"
          << "tokens=" << model.total_tokens() << " vocabulary=" << model.vocabulary_size() << std::fixed
          << std::setprecision(3) << " train_time=" << seconds << "s\n"
          << "model written to " << model_out.string() << '\n';
    } else if (*poison_cmd) {
      auto clean = load_dataset(poison_in);
      AttackConfig cfg;
      cfg.strategy = parse_attack_strategy(attack);
      cfg.rate = rate;
      cfg.seed = s.seed;
      cfg.fixed_token = fixed_token;
      cfg.target_label = target_label;
      auto result = poison(clean, cfg);
      for (const auto& w : result.warnings) err << "warning: " << w << '\n';
      if (records_out.empty()) records_out = fs::path(poison_out.string() + ".records.jsonl");
      save_dataset(result.poisoned, poison_out);
      save_poison_records(result.records, records_out);
      out << "poisoned " << result.records.size() << " of " << clean.size() << " samples with " << attack << '\n'
          << "dataset written to " << poison_out.string() << "\nrecords written to " << records_out.string() << '\n';
    } else if (*scan) {
      auto model = NGramModel::load(scan_model);
      if (!s.tokenizer.empty() && parse_tokenizer_mode(s.tokenizer) != model.tokenizer_mode()) {
        throw ConfigError("model was trained with the " + std::string(to_string(model.tokenizer_mode())) +
                          " tokenizer but --tokenizer " + s.tokenizer + " was requested");
      }
      auto suspect = load_dataset(scan_in);
      const auto t0 = std::chrono::steady_clock::now();
      auto report = identify_triggers(model, suspect, detector_config(s));
      const double seconds = elapsed(t0);
      for (const auto& w : report.warnings) err << "warning: " << w << '\n';
      save_report(report, report_out);
      out << format_report_table(report, table_rows == 0 ? report.k : table_rows);
      out << "flagged " << report.flagged_ids.size() << " of " << suspect.size() << " samples" << std::fixed
          << std::setprecision(3) << " scan_time=" << seconds << "s\n"
          << "report written to " << report_out.string() << '\n';
    } else if (*purify_cmd) {
      auto model = NGramModel::load(purify_model);
      auto report = load_report(purify_report);
      auto suspect = load_dataset(purify_in);
      auto result = purify(suspect, report, model.make_tokenizer());
      save_dataset(result.clean, purify_out);
      if (!removed_out.empty()) save_dataset(result.removed, removed_out);
      out << "removed " << result.removed.size() << " of " << suspect.size() << " samples, kept "
          << result.clean.size() << "\npurified dataset written to " << purify_out.string() << '\n';
    } else if (*eval) {
      auto suspect = load_dataset(eval_in);
      std::vector<std::string> flagged;
      if (!eval_report.empty()) {
        flagged = load_report(eval_report).flagged_ids;
      } else if (!eval_flagged.empty()) {
        flagged = read_id_list(eval_flagged);
      } else {
        throw ConfigError("eval needs --report or --flagged");
      }
      auto truth = eval_truth.empty() ? truth_from_dataset(suspect) : truth_from_records(load_poison_records(eval_truth));
      auto outcome = score(flagged, truth, suspect);
      print_metrics(out, outcome);
      if (!eval_out.empty()) {
        write_file(eval_out, outcome_to_json(outcome).dump(2) + "\n");
        out << "metrics written to " << eval_out.string() << '\n';
      }
    } else if (*sweep) {
      SweepSpec spec;
      spec.axis = parse_sweep_axis(axis);
      spec.values = values;
      spec.fixed.train = train_options(s);
      spec.fixed.detector = detector_config(s);
      spec.parallel_points = parallel_points;
      validate_sweep_spec(spec);
      Scenario scenario = desk_scenario(parse_attack_strategy(attack), sweep_clean.empty() ? clean_size : 1,
                                        sweep_base.empty() ? suspect_size : 1, s.seed, rate);
      if (!sweep_clean.empty()) scenario.clean = load_dataset(sweep_clean);
      if (!sweep_base.empty()) scenario.base = load_dataset(sweep_base);
      auto rows = run_sweep(spec, scenario);
      const auto table = sweep_table(spec.axis, rows);
      write_file(sweep_out, table);
      if (!sweep_json.empty()) write_file(sweep_json, sweep_to_json(spec, rows).dump(2) + "\n");
      out << table;
      std::size_t failed = 0;
      for (const auto& r : rows) {
        if (r.failed) {
          ++failed;
          err << "point " << r.value << " failed: " << r.error << '\n';
        }
      }
      out << rows.size() - failed << " of " << rows.size() << " points completed\ntable written to "
          << sweep_out.string() << '\n';
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace codepurify
