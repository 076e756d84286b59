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

#include "splitforge/assignment.hpp"

#include <set>

#include "splitforge/csv.hpp"
#include "splitforge/errors.hpp"

namespace splitforge {

std::string_view to_string(Partition partition) {
  switch (partition) {
    case Partition::kTrain:
      return "train";
    case Partition::kValid:
      return "valid";
    case Partition::kTestSpeaker:
      return "test_speaker";
    case Partition::kTestUtterance:
      return "test_utterance";
  }
  return "?";
}

Partition partition_from_string(std::string_view name) {
  for (const auto p : kPartitions) {
    if (to_string(p) == name) return p;
  }
  throw ValidationError("unknown partition '" + std::string(name) + "'");
}

std::vector<std::string> verify_assignment(const Dataset& dataset,
                                           const SplitAssignment& assignment,
                                           const DisjointnessPolicy& policy) {
  std::vector<std::string> problems;
  for (const auto& [id, p] : assignment.partition) {
    if (!dataset.find(id)) problems.push_back("unknown utterance '" + id + "'");
  }
  std::vector<Partition> of(dataset.size());
  std::vector<char> assigned(dataset.size(), 0);
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto it = assignment.partition.find(dataset.record(i).utterance_id);
    if (it == assignment.partition.end()) {
      problems.push_back("utterance '" + dataset.record(i).utterance_id +
                         "' is unassigned");
      continue;
    }
    of[i] = it->second;
    assigned[i] = 1;
  }

  // Per speaker / transcript: which partitions they occur in.
  std::vector<std::array<bool, 4>> speaker_in(dataset.speaker_count());
  std::vector<std::array<bool, 4>> transcript_in(dataset.transcript_count());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!assigned[i]) continue;
    const auto p = static_cast<std::size_t>(of[i]);
    speaker_in[dataset.speaker_of(i)][p] = true;
    transcript_in[dataset.transcript_of(i)][p] = true;
  }
  constexpr auto kTr = static_cast<std::size_t>(Partition::kTrain);
  constexpr auto kVa = static_cast<std::size_t>(Partition::kValid);
  constexpr auto kTs = static_cast<std::size_t>(Partition::kTestSpeaker);
  constexpr auto kTu = static_cast<std::size_t>(Partition::kTestUtterance);
  if (policy.speakers_held_out) {
    for (std::size_t s = 0; s < speaker_in.size(); ++s) {
      const auto& in = speaker_in[s];
      if (in[kTs] && (in[kTr] || in[kVa] || in[kTu])) {
        problems.push_back("test_speaker speaker '" + dataset.speaker_id(s) +
                           "' also appears in another partition");
      }
    }
  }
  if (policy.transcripts_held_out) {
    for (std::size_t t = 0; t < transcript_in.size(); ++t) {
      const auto& in = transcript_in[t];
      if (!in[kTu]) continue;
      if (in[kTr] || in[kVa]) {
        problems.push_back("test_utterance transcript '" + dataset.transcript(t) +
                           "' also appears in train or valid");
      }
      if (policy.forbid_test_transcript_sharing && in[kTs]) {
        problems.push_back("test_utterance transcript '" + dataset.transcript(t) +
                           "' also appears in test_speaker");
      }
    }
  }
  return problems;
}

std::string write_split_file(const SplitAssignment& assignment, Partition which) {
  std::string out = "utterance_id,partition\n";
  const std::string name(to_string(which));
  // std::map iterates in byte-wise id order.
  for (const auto& [id, p] : assignment.partition) {
    if (p == which) out += csv::format_row({id, name});
  }
  return out;
}

void read_split_file(std::string_view text, SplitAssignment& into) {
  const auto table = csv::parse(text);
  const auto id_col = table.column("utterance_id");
  const auto part_col = table.column("partition");
  if (!id_col || !part_col) {
    throw ValidationError("split file needs columns utterance_id,partition");
  }
  for (const auto& row : table.rows) {
    const auto p = partition_from_string(row[*part_col]);
    if (!into.partition.emplace(row[*id_col], p).second) {
      throw ValidationError("utterance '" + row[*id_col] +
                            "' is listed in more than one split row");
    }
  }
}

}  // namespace splitforge
