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

#ifndef SPLITFORGE_ASSIGNMENT_HPP_
#define SPLITFORGE_ASSIGNMENT_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "splitforge/manifest.hpp"

namespace splitforge {

enum class Partition { kTrain, kValid, kTestSpeaker, kTestUtterance };

inline constexpr std::array<Partition, 4> kPartitions = {
    Partition::kTrain, Partition::kValid, Partition::kTestSpeaker,
    Partition::kTestUtterance};

std::string_view to_string(Partition partition);
Partition partition_from_string(std::string_view name);

struct Provenance {
  std::string preset;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string tool_version;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct SplitAssignment {
  std::map<std::string, Partition> partition;  // utterance id -> partition
  Provenance provenance;

  friend bool operator==(const SplitAssignment&, const SplitAssignment&) = default;
};

// Options for the split invariants checked by verify_assignment.
struct DisjointnessPolicy {
  bool speakers_held_out = true;     // test_speaker speakers only there
  bool transcripts_held_out = true;  // test_utterance transcripts not in train/valid
  bool forbid_test_transcript_sharing = true;  // ... nor in test_speaker
};

// Independent post-hoc checker reading only the dataset and the
// assignment: totality plus the disjointness rules. Returns one message
// per problem.
std::vector<std::string> verify_assignment(const Dataset& dataset,
                                           const SplitAssignment& assignment,
                                           const DisjointnessPolicy& policy = {});

// Split files: CSV "utterance_id,partition" sorted by utterance id.
std::string write_split_file(const SplitAssignment& assignment, Partition which);
// Parses one split file into `into`. Throws ValidationError on malformed
// rows or an id listed twice.
void read_split_file(std::string_view text, SplitAssignment& into);

}  // namespace splitforge

#endif  // SPLITFORGE_ASSIGNMENT_HPP_
