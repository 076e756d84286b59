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

#ifndef SPLITFORGE_PIPELINE_HPP_
#define SPLITFORGE_PIPELINE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splitforge/ascent.hpp"
#include "splitforge/assignment.hpp"
#include "splitforge/objective.hpp"
#include "splitforge/report.hpp"

namespace splitforge {

inline constexpr std::string_view kToolVersion = "0.1.0";

// train:valid:test_speaker:test_utterance, summing to 100.
struct Ratios {
  std::array<double, 4> parts{70.0, 10.0, 10.0, 10.0};

  double train() const { return parts[0]; }
  double valid() const { return parts[1]; }
  double test_speaker() const { return parts[2]; }
  double test_utterance() const { return parts[3]; }
};

// Parses "a:b:c:d". Throws ValidationError unless there are four
// non-negative parts summing to 100 with train and valid positive.
Ratios parse_ratios(std::string_view text);
std::string format_ratios(const Ratios& ratios);

struct SplitPreset {
  std::string name;
  // Stage 1 runs over speaker blocks, stage 2 over transcript blocks.
  // A preset without stages is a stratified random split.
  std::optional<ObjectiveConfig> speaker_stage;
  std::optional<ObjectiveConfig> utterance_stage;
  Ratios ratios;
  // Whether test_utterance transcripts may also occur in test_speaker.
  bool allow_shared_test_transcripts = false;
};

// "unseen", "challenge", "snips" (single combined held-out set) or
// "random". Target sizes are filled in from the ratios at run time.
SplitPreset make_preset(std::string_view name);

struct PipelineOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::size_t max_passes = 100;
  MoveRule rule = MoveRule::kFirstImprovement;
  bool debug_check = false;
  std::string config_digest;
  // Receives the line-delimited ascent trace of each stage when set.
  std::function<void(std::string_view stage, const std::string& lines)> trace_sink;
};

struct StageSummary {
  std::string stage;
  std::size_t blocks = 0;
  std::size_t eligible_pool = 0;
  std::size_t background = 0;
  std::size_t target_size = 0;
  std::size_t tolerance = 0;
  double best_score = 0.0;
  std::size_t best_restart = 0;
  std::vector<double> term_values;
  std::vector<RestartSummary> restarts;
};

struct PipelineResult {
  SplitAssignment assignment;
  SplitReport report;
  std::vector<StageSummary> stages;
};

// Stage 1 holds out speakers, stage 2 holds out transcripts from the
// remaining pool, stage 3 splits the rest into train and valid
// stratified by intent. Throws InfeasibleError naming the failing stage.
PipelineResult run_pipeline(const Dataset& dataset, const SplitPreset& preset,
                            const PipelineOptions& options);

// Stratified apportionment: items grouped by label, each group shuffled
// and divided among the partitions by largest remainder on `weights`
// (ties to the lower partition). Single-item groups go to partition 0.
// Items flagged in `pinned` always land in partition 0. Returns one item
// list per weight, each in ascending order.
std::vector<std::vector<std::size_t>> stratified_apportion(
    std::span<const std::size_t> items, std::span<const std::size_t> labels,
    std::span<const double> weights, std::uint64_t seed,
    std::span<const char> pinned = {});

struct TrainValid {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

// stratified_apportion over intent labels with weights train:valid.
TrainValid stratified_train_valid(const Dataset& dataset,
                                  std::span<const std::size_t> pool,
                                  double train_weight, double valid_weight,
                                  std::uint64_t seed,
                                  std::span<const char> pinned = {});

}  // namespace splitforge

#endif  // SPLITFORGE_PIPELINE_HPP_
