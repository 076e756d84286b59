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

#include "splitforge/report.hpp"

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "splitforge/errors.hpp"
#include "splitforge/pipeline.hpp"
#include "splitforge/synth.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace splitforge {
namespace {

Dataset six_utterances() {
  return fixtures::make_dataset({{"u1", "s1", "turn on lights", "x", "turn of lights"},
                                 {"u2", "s1", "turn off lights", "y", "turn off lights"},
                                 {"u3", "s2", "turn on lights", "x", "turn on"},
                                 {"u4", "s2", "play music", "z", "play the music"},
                                 {"u5", "s3", "play music", "z"},
                                 {"u6", "s3", "turn off lights", "y", "turn off lights"}},
                                {{"s1", {{"g", "f"}}}, {"s2", {{"g", "m"}}}, {"s3", {{"g", "f"}}}});
}

SplitAssignment six_assignment() {
  SplitAssignment a;
  a.partition = {{"u1", Partition::kTrain},       {"u2", Partition::kValid},
                 {"u3", Partition::kTrain},       {"u4", Partition::kTestUtterance},
                 {"u5", Partition::kTestSpeaker}, {"u6", Partition::kTestSpeaker}};
  a.provenance = {"hand", "abc", 7, "0.1.0"};
  return a;
}

TEST(Audit, HandComputedSixUtteranceCase) {
  const auto d = six_utterances();
  const auto r = audit(d, six_assignment());
  EXPECT_EQ(r.sizes, (std::array<std::size_t, 4>{2, 1, 2, 1}));
  ASSERT_EQ(r.test_sets.size(), 2u);

  const auto& ts = r.test_sets[0];
  EXPECT_EQ(ts.partition, Partition::kTestSpeaker);
  EXPECT_EQ(ts.size, 2u);
  EXPECT_EQ(ts.speakers, 1u);
  EXPECT_EQ(ts.transcripts, 2u);
  EXPECT_DOUBLE_EQ(*ts.speaker_coverage, 0.0);
  EXPECT_DOUBLE_EQ(*ts.utterance_coverage, 0.0);
  EXPECT_NEAR(*ts.speaker_kl, oracle::jeffreys({1, 0}, {1, 1}, kDefaultSmoothing), 1e-12);
  EXPECT_EQ(ts.with_hypothesis, 1u);
  EXPECT_EQ(ts.without_hypothesis, 1u);
  EXPECT_DOUBLE_EQ(ts.wer->wer, 0.0);
  EXPECT_NEAR(*ts.ngram_overlap[0], 100.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(*ts.ngram_overlap[1], 0.0);
  EXPECT_DOUBLE_EQ(*ts.ngram_overlap[2], 0.0);
  EXPECT_FALSE(ts.ngram_overlap[3].has_value());

  const auto& tu = r.test_sets[1];
  EXPECT_EQ(tu.partition, Partition::kTestUtterance);
  EXPECT_DOUBLE_EQ(*tu.speaker_coverage, 100.0);
  EXPECT_DOUBLE_EQ(*tu.utterance_coverage, 0.0);
  EXPECT_NEAR(*tu.speaker_kl, oracle::jeffreys({0, 1}, {1, 1}, kDefaultSmoothing), 1e-12);
  EXPECT_EQ(tu.alignment, (AlignmentCounts{0, 1, 0, 2}));
  EXPECT_DOUBLE_EQ(tu.wer->insertion, 0.5);
  EXPECT_DOUBLE_EQ(tu.wer->wer, 0.5);
  EXPECT_DOUBLE_EQ(*tu.ngram_overlap[0], 0.0);
  EXPECT_FALSE(tu.ngram_overlap[2].has_value());

  EXPECT_DOUBLE_EQ(*r.intent_l1_train_valid, 2.0);
  EXPECT_EQ(r.dataset_with_hypothesis, 5u);
  EXPECT_DOUBLE_EQ(r.dataset_wer->substitution, 1.0 / 14.0);
  EXPECT_DOUBLE_EQ(r.dataset_wer->insertion, 1.0 / 14.0);
  EXPECT_DOUBLE_EQ(r.dataset_wer->deletion, 1.0 / 14.0);
  EXPECT_DOUBLE_EQ(r.dataset_wer->wer, 3.0 / 14.0);
  EXPECT_EQ(r.provenance.preset, "hand");
}

TEST(Audit, ListsUnknownAndUnassignedIds) {
  const auto d = six_utterances();
  auto a = six_assignment();
  a.partition["ghost"] = Partition::kTrain;
  try {
    audit(d, a);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
  a = six_assignment();
  a.partition.erase("u4");
  a.partition.erase("u5");
  try {
    audit(d, a);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("u4, u5"), std::string::npos);
  }
}

TEST(Audit, IsPureAndRandomSplitsCoverNearlyEverything) {
  auto spec = default_synth_spec();
  spec.speakers = 30;
  const auto d = generate_dataset(spec);
  PipelineOptions options;
  const auto result = run_pipeline(d, make_preset("random"), options);
  const auto once = report_to_json(audit(d, result.assignment));
  const auto twice = report_to_json(audit(d, result.assignment));
  EXPECT_EQ(once, twice);
  for (const auto& t : result.report.test_sets) {
    EXPECT_DOUBLE_EQ(*t.speaker_coverage, 100.0);
    EXPECT_GE(*t.utterance_coverage, 95.0);
  }
}

TEST(Audit, CoverageIsWithinBoundsAndSizesSum) {
  const auto d = fixtures::random_dataset(4, 15, 6);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    SplitAssignment a;
    for (const auto& rec : d.records()) {
      a.partition[rec.utterance_id] = kPartitions[rng.below(4)];
    }
    const auto r = audit(d, a);
    EXPECT_EQ(r.sizes[0] + r.sizes[1] + r.sizes[2] + r.sizes[3], d.size());
    for (const auto& t : r.test_sets) {
      if (t.size == 0) continue;
      EXPECT_GE(*t.speaker_coverage, 0.0);
      EXPECT_LE(*t.speaker_coverage, 100.0);
      EXPECT_GE(*t.utterance_coverage, 0.0);
      EXPECT_LE(*t.utterance_coverage, 100.0);
    }
  }
}

TEST(ReportJson, HasProvenanceAndStatistics) {
  const auto j = report_to_json(audit(six_utterances(), six_assignment()));
  EXPECT_EQ(j["provenance"]["config_digest"], "abc");
  EXPECT_EQ(j["provenance"]["seed"], 7);
  EXPECT_EQ(j["statistics"]["sizes"]["valid"], 1);
  EXPECT_EQ(j["statistics"]["test_sets"]["test_speaker"]["speaker_coverage_pct"], 0.0);
  EXPECT_TRUE(j["statistics"]["test_sets"]["test_speaker"]["ngram_overlap_pct"][3].is_null());
}

TEST(RenderTable, MirrorsCoverageColumnsAndEmptySets) {
  auto a = six_assignment();
  a.partition["u4"] = Partition::kTrain;
  const auto text = render_table(audit(six_utterances(), a));
  EXPECT_NE(text.find("Speaker Coverage  Utterance Coverage  Speaker KL  Test Size"),
            std::string::npos);
  EXPECT_NE(text.find("test_speaker"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
}

TEST(RenderComparison, ColumnsInInputOrder) {
  const auto d = six_utterances();
  const auto r = audit(d, six_assignment());
  const auto text = render_comparison({"third", "first", "second"}, {r, r, r});
  const auto header = text.substr(0, text.find('\n'));
  EXPECT_LT(header.find("third"), header.find("first"));
  EXPECT_LT(header.find("first"), header.find("second"));
  // Identical reports give identical columns.
  const auto row_start = text.find("test_speaker speaker KL");
  const auto row = text.substr(row_start, text.find('\n', row_start) - row_start);
  const auto kl = fmt::format("{:.4f}", *r.test_sets[0].speaker_kl);
  std::size_t hits = 0;
  for (auto pos = row.find(kl); pos != std::string::npos; pos = row.find(kl, pos + 1)) ++hits;
  EXPECT_EQ(hits, 3u);
}

}  // namespace
}  // namespace splitforge
