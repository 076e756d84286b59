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

#include <gtest/gtest.h>

#include "splitforge/errors.hpp"
#include "support/fixtures.hpp"

namespace splitforge {
namespace {

Dataset small() {
  return fixtures::make_dataset({{"u1", "s1", "a", "x"},
                                 {"u2", "s1", "b", "x"},
                                 {"u3", "s2", "a", "x"},
                                 {"u4", "s3", "c", "x"},
                                 {"u5", "s3", "d", "x"}});
}

SplitAssignment assign(std::map<std::string, Partition> p) { return {std::move(p), {}}; }

TEST(VerifyAssignment, AcceptsAValidSplit) {
  const auto a = assign({{"u1", Partition::kTrain},
                         {"u2", Partition::kValid},
                         {"u3", Partition::kTestSpeaker},
                         {"u4", Partition::kTestUtterance},
                         {"u5", Partition::kTrain}});
  EXPECT_TRUE(verify_assignment(small(), a).empty());
}

TEST(VerifyAssignment, ReportsEveryKindOfProblem) {
  const auto a = assign({{"u1", Partition::kTestSpeaker},
                         {"u2", Partition::kTrain},
                         {"u3", Partition::kTestUtterance},
                         {"u4", Partition::kTestUtterance},
                         {"zz", Partition::kTrain}});
  const auto problems = verify_assignment(small(), a);
  auto has = [&](std::string_view text) {
    return std::any_of(problems.begin(), problems.end(),
                       [&](const auto& p) { return p.find(text) != std::string::npos; });
  };
  EXPECT_TRUE(has("unknown utterance 'zz'"));
  EXPECT_TRUE(has("'u5' is unassigned"));
  EXPECT_TRUE(has("speaker 's1' also appears"));
  EXPECT_TRUE(has("transcript 'a' also appears in test_speaker"));
  DisjointnessPolicy lenient;
  lenient.speakers_held_out = false;
  lenient.forbid_test_transcript_sharing = false;
  const auto fewer = verify_assignment(small(), a, lenient);
  EXPECT_EQ(fewer.size(), 2u);
}

TEST(SplitFiles, SortedRoundTrip) {
  const auto a = assign({{"u10", Partition::kTrain},
                         {"u2", Partition::kTrain},
                         {"u,3", Partition::kValid},
                         {"u1", Partition::kTestSpeaker}});
  EXPECT_EQ(write_split_file(a, Partition::kTrain), "utterance_id,partition\nu10,train\nu2,train\n");
  EXPECT_EQ(write_split_file(a, Partition::kTestUtterance), "utterance_id,partition\n");
  SplitAssignment back;
  for (const auto p : kPartitions) read_split_file(write_split_file(a, p), back);
  EXPECT_EQ(back.partition, a.partition);
}

TEST(SplitFiles, RejectsBadRows) {
  SplitAssignment a;
  EXPECT_THROW(read_split_file("id,partition\nu1,train\n", a), ValidationError);
  EXPECT_THROW(read_split_file("utterance_id,partition\nu1,holdout\n", a), ValidationError);
  read_split_file("utterance_id,partition\nu1,train\n", a);
  EXPECT_THROW(read_split_file("utterance_id,partition\nu1,valid\n", a), ValidationError);
}

TEST(Partition, NamesRoundTrip) {
  for (const auto p : kPartitions) EXPECT_EQ(partition_from_string(to_string(p)), p);
}

}  // namespace
}  // namespace splitforge
