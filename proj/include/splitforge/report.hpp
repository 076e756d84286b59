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

#ifndef SPLITFORGE_REPORT_HPP_
#define SPLITFORGE_REPORT_HPP_

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "splitforge/assignment.hpp"
#include "splitforge/distrib.hpp"
#include "splitforge/manifest.hpp"
#include "splitforge/textmetrics.hpp"

namespace splitforge {

struct AuditOptions {
  DemographicMode demographic_mode = DemographicMode::kJoint;
  double smoothing = kDefaultSmoothing;
  Parallelism parallelism = Parallelism::kParallel;
};

// Statistics of one test partition measured against train. Optional
// fields are empty when undefined (empty partition, no hypotheses, no
// transcript long enough for an n-gram order).
struct TestSetStats {
  Partition partition = Partition::kTestSpeaker;
  std::size_t size = 0;
  std::size_t speakers = 0;
  std::size_t transcripts = 0;
  std::optional<double> speaker_coverage;    // % of distinct speakers in train
  std::optional<double> utterance_coverage;  // % of distinct transcripts in train
  std::optional<double> speaker_kl;          // demographics, test vs train speakers
  std::size_t with_hypothesis = 0;
  std::size_t without_hypothesis = 0;
  AlignmentCounts alignment;
  std::optional<WerRates> wer;  // micro-averaged
  std::array<std::optional<double>, kMaxNgramOrder> ngram_overlap;  // % vs train
};

struct SplitReport {
  std::array<std::size_t, 4> sizes{};  // indexed by Partition
  std::vector<TestSetStats> test_sets;  // test_speaker, test_utterance
  std::optional<double> intent_l1_train_valid;
  std::optional<WerRates> dataset_wer;
  std::size_t dataset_with_hypothesis = 0;
  Provenance provenance;
};

// Read-only audit of any total assignment. Throws ValidationError listing
// unknown or unassigned utterance ids.
SplitReport audit(const Dataset& dataset, const SplitAssignment& assignment,
                  const AuditOptions& options = {});

// {"provenance": {...}, "statistics": {...}}; "statistics" depends only
// on the dataset and the assignment.
nlohmann::ordered_json report_to_json(const SplitReport& report);

// Aligned plain-text tables: coverage/KL/size, WER breakdown, n-gram overlap.
std::string render_table(const SplitReport& report);

// One column per report, in input order.
std::string render_comparison(const std::vector<std::string>& names,
                              const std::vector<SplitReport>& reports);

}  // namespace splitforge

#endif  // SPLITFORGE_REPORT_HPP_
