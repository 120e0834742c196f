#pragma once

#include "codepurify/attacks.hpp"
#include "codepurify/dataset.hpp"
#include "codepurify/detector.hpp"
#include "codepurify/metrics.hpp"
#include "codepurify/ngram_model.hpp"

namespace codepurify {

struct PipelineConfig {
  TrainOptions train;
  DetectorConfig detector;
};

struct PipelineResult {
  NGramModel model;
  TriggerReport report;
  PurifyResult purified;
  DetectionOutcome outcome;
};

/// Train on `clean`, scan and purify `suspect`, score against the
/// suspect's `poisoned` flags.
PipelineResult run_pipeline(const Dataset& clean, const Dataset& suspect, const PipelineConfig& config = {});

/// A clean training corpus, an unpoisoned suspect pool, and the attack that
/// turns the pool into the suspect set.
struct Scenario {
  Dataset clean;
  Dataset base;
  AttackConfig attack;
};

struct ScenarioResult {
  PoisonResult poison;
  PipelineResult pipeline;
};

ScenarioResult run_scenario(const Scenario& scenario, const PipelineConfig& config = {});

/// Desk-scale scenario built from the synthetic corpus: `clean_size`
/// training snippets and a disjoint pool of `suspect_size` snippets.
Scenario desk_scenario(AttackStrategy strategy, std::size_t clean_size = 2000, std::size_t suspect_size = 2000,
                       std::uint64_t seed = 7, double rate = 0.01);

}  // namespace codepurify
