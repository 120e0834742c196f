#include "codepurify/pipeline.hpp"

#include <chrono>

#include "codepurify/synthetic.hpp"

namespace codepurify {
namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

PipelineResult run_pipeline(const Dataset& clean, const Dataset& suspect, const PipelineConfig& config) {
  PipelineResult result;
  StageTimes times;

  auto t0 = std::chrono::steady_clock::now();
  result.model = NGramModel::train(clean, config.train);
  times.train_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.report = identify_triggers(result.model, suspect, config.detector);
  times.scan_seconds = seconds_since(t0);

  t0 = std::chrono::steady_clock::now();
  result.purified = purify(suspect, result.report, result.model.make_tokenizer());
  times.purify_seconds = seconds_since(t0);

  std::vector<std::string> flagged;
  flagged.reserve(result.purified.removed.size());
  for (const auto& s : result.purified.removed.samples) flagged.push_back(s.id);
  result.outcome = score(flagged, truth_from_dataset(suspect), suspect);
  result.outcome.wall_time = times;
  return result;
}

ScenarioResult run_scenario(const Scenario& scenario, const PipelineConfig& config) {
  ScenarioResult result;
  result.poison = poison(scenario.base, scenario.attack);
  result.pipeline = run_pipeline(scenario.clean, result.poison.poisoned, config);
  return result;
}

Scenario desk_scenario(AttackStrategy strategy, std::size_t clean_size, std::size_t suspect_size,
                       std::uint64_t seed, double rate) {
  Scenario s;
  s.clean = generate_corpus({clean_size, mix_seed(seed, 1), "clean"});
  s.base = generate_corpus({suspect_size, mix_seed(seed, 2), "suspect"});
  s.attack.strategy = strategy;
  s.attack.rate = rate;
  s.attack.seed = mix_seed(seed, 3);
  return s;
}

}  // namespace codepurify
