// Copyright 2026 The SplitForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "splitforge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

#include "splitforge/errors.hpp"
#include "splitforge/rng.hpp"

namespace splitforge {

Ratios parse_ratios(std::string_view text) {
  Ratios ratios;
  std::size_t start = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto colon = text.find(':', start);
    if ((i < 3) == (colon == std::string_view::npos)) {
      throw ValidationError("ratios must look like train:valid:test_speaker:test_utterance");
    }
    const std::string part(text.substr(start, colon - start));
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != part.size() || part.empty()) {
      throw ValidationError("ratio part '" + part + "' is not a number");
    }
    ratios.parts[i] = value;
    start = colon + 1;
  }
  const double sum = std::accumulate(ratios.parts.begin(), ratios.parts.end(), 0.0);
  if (std::any_of(ratios.parts.begin(), ratios.parts.end(),
                  [](double v) { return !(v >= 0.0) || !std::isfinite(v); }) ||
      !(ratios.train() > 0.0) || !(ratios.valid() > 0.0) ||
      std::abs(sum - 100.0) > 1e-9) {
    throw ValidationError("ratios must be non-negative, sum to 100, and give "
                          "train and valid a positive share");
  }
  return ratios;
}

std::string format_ratios(const Ratios& ratios) {
  std::string out;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i) out += ':';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", ratios.parts[i]);
    out += buf;
  }
  return out;
}

namespace {

UtilityTerm term(TermKind kind, Direction direction, double weight = 1.0,
                 std::map<std::string, double> parameters = {}) {
  return {kind, direction, weight, std::move(parameters)};
}

ObjectiveConfig unseen_speaker_stage() {
  ObjectiveConfig c;
  c.terms = {term(TermKind::kDemographicKl, Direction::kMinimize),
             term(TermKind::kNgramOverlap, Direction::kMaximize, 1.0,
                  {{"w1", 0.5}, {"w2", 0.5}, {"w3", 0.0}, {"w4", 0.0}})};
  c.constraints.block_kind = BlockKind::kSpeaker;
  c.constraints.require_full_transcript_coverage = true;
  return c;
}

ObjectiveConfig unseen_utterance_stage() {
  ObjectiveConfig c;
  c.terms = {term(TermKind::kIntentKl, Direction::kMinimize),
             term(TermKind::kLengthKl, Direction::kMinimize)};
  c.constraints.block_kind = BlockKind::kTranscript;
  c.constraints.require_full_speaker_coverage = true;
  return c;
}

}  // namespace

SplitPreset make_preset(std::string_view name) {
  SplitPreset preset;
  preset.name = std::string(name);
  if (name == "unseen") {
    preset.speaker_stage = unseen_speaker_stage();
    preset.utterance_stage = unseen_utterance_stage();
  } else if (name == "challenge") {
    preset.speaker_stage = unseen_speaker_stage();
    preset.speaker_stage->terms.push_back(
        term(TermKind::kWerChallenge, Direction::kMaximize, 10.0,
             {{"alpha", 0.05}, {"beta", 0.05}, {"gamma", 0.4}}));
    preset.utterance_stage = unseen_utterance_stage();
    preset.utterance_stage->terms.push_back(
        term(TermKind::kBleuChallenge, Direction::kMaximize, 1.0,
             {{"w1", 0.5}, {"w2", 0.5}, {"w3", 0.0}, {"w4", 0.0}}));
  } else if (name == "snips") {
    ObjectiveConfig c;
    c.terms = {term(TermKind::kDemographicKl, Direction::kMinimize),
               term(TermKind::kIntentKl, Direction::kMinimize),
               term(TermKind::kLengthKl, Direction::kMinimize)};
    c.constraints.block_kind = BlockKind::kSpeaker;
    preset.speaker_stage = c;
    preset.ratios.parts = {75.0, 10.0, 15.0, 0.0};
  } else if (name == "random") {
    // Stratified random split over all four partitions.
  } else {
    throw ValidationError("unknown preset '" + std::string(name) +
                          "' (expected unseen, challenge, snips or random)");
  }
  return preset;
}

std::vector<std::vector<std::size_t>> stratified_apportion(
    std::span<const std::size_t> items, std::span<const std::size_t> labels,
    std::span<const double> weights, std::uint64_t seed,
    std::span<const char> pinned) {
  if (labels.size() != items.size() || (!pinned.empty() && pinned.size() != items.size())) {
    throw std::invalid_argument("stratified_apportion: length mismatch");
  }
  if (weights.empty()) throw std::invalid_argument("stratified_apportion: no weights");
  const double total_weight = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total_weight > 0.0)) {
    throw std::invalid_argument("stratified_apportion: weights sum to zero");
  }

  std::map<std::size_t, std::vector<std::size_t>> groups;  // label -> positions
  for (std::size_t i = 0; i < items.size(); ++i) groups[labels[i]].push_back(i);

  const auto k = weights.size();
  std::vector<std::vector<std::size_t>> out(k);
  Rng rng(seed);
  for (auto& [label, positions] : groups) {
    rng.shuffle(std::span(positions));
    const auto n = positions.size();
    std::vector<std::size_t> quota(k, 0);
    std::vector<double> exact(k, 0.0);
    if (n == 1) {
      quota[0] = 1;
    } else {
      std::size_t assigned = 0;
      for (std::size_t j = 0; j < k; ++j) {
        exact[j] = static_cast<double>(n) * weights[j] / total_weight;
        quota[j] = static_cast<std::size_t>(std::floor(exact[j]));
        assigned += quota[j];
      }
      std::vector<std::size_t> by_remainder(k);
      std::iota(by_remainder.begin(), by_remainder.end(), std::size_t{0});
      std::stable_sort(by_remainder.begin(), by_remainder.end(), [&](auto a, auto b) {
        return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
      });
      for (std::size_t r = 0; assigned < n; ++r, ++assigned) {
        ++quota[by_remainder[r % k]];
      }
    }

    std::size_t pinned_count = 0;
    if (!pinned.empty()) {
      for (const auto p : positions) pinned_count += pinned[p] ? 1 : 0;
    }
    while (quota[0] < pinned_count) {
      std::size_t donor = k;
      for (std::size_t j = 1; j < k; ++j) {
        if (quota[j] == 0) continue;
        if (donor == k || static_cast<double>(quota[j]) - exact[j] >
                              static_cast<double>(quota[donor]) - exact[donor]) {
          donor = j;
        }
      }
      --quota[donor];
      ++quota[0];
    }

    std::size_t partition = 0;
    std::size_t filled = pinned_count;
    for (const auto p : positions) {
      if (!pinned.empty() && pinned[p]) out[0].push_back(items[p]);
    }
    for (const auto p : positions) {
      if (!pinned.empty() && pinned[p]) continue;
      while (filled >= quota[partition]) {
        ++partition;
        filled = 0;
      }
      out[partition].push_back(items[p]);
      ++filled;
    }
  }
  for (auto& part : out) std::sort(part.begin(), part.end());
  return out;
}

TrainValid stratified_train_valid(const Dataset& dataset,
                                  std::span<const std::size_t> pool,
                                  double train_weight, double valid_weight,
                                  std::uint64_t seed, std::span<const char> pinned) {
  std::vector<std::size_t> labels;
  labels.reserve(pool.size());
  for (const auto i : pool) labels.push_back(dataset.intent_of(i));
  const std::array<double, 2> weights{train_weight, valid_weight};
  auto parts = stratified_apportion(pool, labels, weights, seed, pinned);
  return {std::move(parts[0]), std::move(parts[1])};
}

namespace {

std::size_t target_for(std::size_t dataset_size, double percent) {
  return static_cast<std::size_t>(
      std::llround(static_cast<double>(dataset_size) * percent / 100.0));
}

struct StageOutput {
  std::vector<std::size_t> test;  // record indices, ascending
  StageSummary summary;
};

StageOutput run_stage(const Dataset& dataset, std::string stage_name,
                      ObjectiveConfig config, std::size_t target,
                      const std::vector<std::size_t>& eligible,
                      std::vector<std::size_t> background, std::uint64_t seed,
                      const PipelineOptions& options) {
  config.constraints.target_size = target;
  auto blocks = build_blocks(dataset, config.constraints.block_kind, eligible);
  StageOutput out;
  out.summary.stage = stage_name;
  out.summary.blocks = blocks.size();
  out.summary.eligible_pool = eligible.size();
  out.summary.background = background.size();
  out.summary.target_size = target;

  try {
    if (eligible.empty()) {
      throw InfeasibleError("", "no eligible utterances remain");
    }
    Objective objective(dataset, std::move(blocks), std::move(background), config);
    out.summary.tolerance = objective.size_tolerance();
    if (config.normalize) {
      std::vector<CandidateSplit> samples;
      for (std::uint64_t i = 0; i < 16; ++i) {
        samples.push_back(initialize(objective, derive_seed(seed, 1000 + i)));
      }
      objective.calibrate(samples);
    }
    AscentOptions ascent;
    ascent.seed = seed;
    ascent.restarts = options.restarts;
    ascent.max_passes = options.max_passes;
    ascent.rule = options.rule;
    ascent.debug_check = options.debug_check;
    ascent.record_trace = static_cast<bool>(options.trace_sink);
    const auto result = run_ascent(objective, ascent);
    if (options.trace_sink) options.trace_sink(stage_name, format_trace(result.trace));

    out.summary.best_score = result.best_score;
    out.summary.best_restart = result.best_restart;
    out.summary.term_values = objective.term_values(result.best);
    out.summary.restarts = result.restarts;
    for (const auto& id : result.best.test) {
      const auto& members = objective.blocks()[*objective.block_index(id)].members;
      out.test.insert(out.test.end(), members.begin(), members.end());
    }
    std::sort(out.test.begin(), out.test.end());
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(stage_name, e.what());
  }
  return out;
}

// Chooses utterances that must stay in train so every listed transcript
// and speaker keeps at least one training instance. Utterances covering
// both kinds of need are taken first.
std::vector<char> pin_coverage(const Dataset& dataset,
                               const std::vector<std::size_t>& pool,
                               std::set<std::size_t> transcripts,
                               std::set<std::size_t> speakers) {
  std::vector<char> pinned(pool.size(), 0);
  for (const int want : {2, 1}) {
    for (std::size_t p = 0; p < pool.size(); ++p) {
      const auto i = pool[p];
      const int hits = (transcripts.contains(dataset.transcript_of(i)) ? 1 : 0) +
                       (speakers.contains(dataset.speaker_of(i)) ? 1 : 0);
      if (hits < want) continue;
      pinned[p] = 1;
      transcripts.erase(dataset.transcript_of(i));
      speakers.erase(dataset.speaker_of(i));
    }
  }
  if (!transcripts.empty()) {
    throw InfeasibleError("train/valid stage",
                          "transcript '" + dataset.transcript(*transcripts.begin()) +
                              "' has no remaining instance for train");
  }
  if (!speakers.empty()) {
    throw InfeasibleError("train/valid stage",
                          "speaker '" + dataset.speaker_id(*speakers.begin()) +
                              "' has no remaining utterance for train");
  }
  return pinned;
}

}  // namespace

PipelineResult run_pipeline(const Dataset& dataset, const SplitPreset& preset,
                            const PipelineOptions& options) {
  const auto n = dataset.size();
  std::vector<Partition> of(n, Partition::kTrain);
  std::vector<char> taken(n, 0);
  PipelineResult result;

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  if (!preset.speaker_stage && !preset.utterance_stage) {
    std::vector<std::size_t> labels;
    for (const auto i : all) labels.push_back(dataset.intent_of(i));
    const auto parts = stratified_apportion(all, labels, preset.ratios.parts,
                                            derive_seed(options.seed, 3));
    for (std::size_t p = 0; p < parts.size(); ++p) {
      for (const auto i : parts[p]) of[i] = kPartitions[p];
    }
  } else {
    std::set<std::size_t> required_transcripts;
    std::set<std::size_t> required_speakers;

    const auto speaker_target = target_for(n, preset.ratios.test_speaker());
    if (preset.speaker_stage && speaker_target > 0) {
      auto stage = run_stage(dataset, "speaker stage", *preset.speaker_stage,
                             speaker_target, all, {}, derive_seed(options.seed, 1),
                             options);
      for (const auto i : stage.test) {
        of[i] = Partition::kTestSpeaker;
        taken[i] = 1;
        if (preset.speaker_stage->constraints.require_full_transcript_coverage) {
          required_transcripts.insert(dataset.transcript_of(i));
        }
      }
      result.stages.push_back(std::move(stage.summary));
    }

    const auto utterance_target = target_for(n, preset.ratios.test_utterance());
    if (preset.utterance_stage && utterance_target > 0) {
      std::set<std::size_t> held_out_transcripts;
      if (!preset.allow_shared_test_transcripts) {
        for (std::size_t i = 0; i < n; ++i) {
          if (taken[i]) held_out_transcripts.insert(dataset.transcript_of(i));
        }
      }
      std::vector<std::size_t> eligible;
      std::vector<std::size_t> background;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        (held_out_transcripts.contains(dataset.transcript_of(i)) ? background : eligible)
            .push_back(i);
      }
      auto stage = run_stage(dataset, "utterance stage", *preset.utterance_stage,
                             utterance_target, eligible, std::move(background),
                             derive_seed(options.seed, 2), options);
      for (const auto i : stage.test) {
        of[i] = Partition::kTestUtterance;
        taken[i] = 1;
        if (preset.utterance_stage->constraints.require_full_speaker_coverage) {
          required_speakers.insert(dataset.speaker_of(i));
        }
      }
      result.stages.push_back(std::move(stage.summary));
    }

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (!taken[i]) rest.push_back(i);
    }
    const auto pinned = pin_coverage(dataset, rest, required_transcripts, required_speakers);
    const auto split = stratified_train_valid(dataset, rest, preset.ratios.train(),
                                              preset.ratios.valid(),
                                              derive_seed(options.seed, 3), pinned);
    for (const auto i : split.train) of[i] = Partition::kTrain;
    for (const auto i : split.valid) of[i] = Partition::kValid;
  }

  auto& assignment = result.assignment;
  for (std::size_t i = 0; i < n; ++i) {
    assignment.partition.emplace(dataset.record(i).utterance_id, of[i]);
  }
  assignment.provenance = {preset.name, options.config_digest, options.seed,
                           std::string(kToolVersion)};

  if (preset.speaker_stage || preset.utterance_stage) {
    DisjointnessPolicy policy;
    policy.forbid_test_transcript_sharing = !preset.allow_shared_test_transcripts;
    const auto problems = verify_assignment(dataset, assignment, policy);
    if (!problems.empty()) {
      throw std::logic_error("pipeline produced an invalid assignment: " + problems.front());
    }
  }
  result.report = audit(dataset, assignment);
  return result;
}

}  // namespace splitforge
