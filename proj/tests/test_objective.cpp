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

#include "splitforge/objective.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "splitforge/distrib.hpp"
#include "splitforge/errors.hpp"
#include "splitforge/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace splitforge {
namespace {

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = i;
  return out;
}

UtilityTerm term(TermKind kind, Direction dir, double weight,
                 std::map<std::string, double> params = {}) {
  return {kind, dir, weight, std::move(params)};
}

// Term values recomputed from the record lists of the two sides.
std::vector<double> brute_terms(const Dataset& d, const ObjectiveConfig& config,
                                const std::vector<std::size_t>& test,
                                const std::vector<std::size_t>& complement) {
  auto histogram = [&](auto key_of, std::size_t bins, const std::vector<std::size_t>& side) {
    std::vector<double> h(bins, 0.0);
    for (const auto i : side) h[key_of(i)] += 1.0;
    return h;
  };
  std::set<std::size_t> lengths;
  for (std::size_t i = 0; i < d.size(); ++i) lengths.insert(d.tokens(i).size());
  const std::vector<std::size_t> length_list(lengths.begin(), lengths.end());
  auto length_bin = [&](std::size_t i) {
    return static_cast<std::size_t>(
        std::find(length_list.begin(), length_list.end(), d.tokens(i).size()) -
        length_list.begin());
  };
  std::vector<oracle::Words> test_distinct, comp_distinct;
  {
    std::set<std::size_t> t, c;
    for (const auto i : test) t.insert(d.transcript_of(i));
    for (const auto i : complement) c.insert(d.transcript_of(i));
    for (const auto x : t) test_distinct.push_back(d.transcript_tokens(x));
    for (const auto x : c) comp_distinct.push_back(d.transcript_tokens(x));
  }

  std::vector<double> values;
  for (const auto& tm : config.terms) {
    auto w = [&](const char* k, double fallback) {
      const auto it = tm.parameters.find(k);
      return it == tm.parameters.end() ? fallback : it->second;
    };
    const std::array<double, 4> orders{w("w1", 0.5), w("w2", 0.5), w("w3", 0.0), w("w4", 0.0)};
    switch (tm.kind) {
      case TermKind::kDemographicKl: {
        std::set<std::size_t> ts, cs;
        for (const auto i : test) ts.insert(d.speaker_of(i));
        for (const auto i : complement) cs.insert(d.speaker_of(i));
        values.push_back(demographic_kl(d, ts, cs, config.demographic_mode, config.smoothing));
        break;
      }
      case TermKind::kIntentKl:
        values.push_back(oracle::jeffreys(
            histogram([&](std::size_t i) { return d.intent_of(i); }, d.intent_count(), test),
            histogram([&](std::size_t i) { return d.intent_of(i); }, d.intent_count(),
                      complement),
            config.smoothing));
        break;
      case TermKind::kLengthKl:
        values.push_back(oracle::jeffreys(histogram(length_bin, length_list.size(), test),
                                          histogram(length_bin, length_list.size(), complement),
                                          config.smoothing));
        break;
      case TermKind::kWerChallenge: {
        std::size_t s = 0, ins = 0, del = 0, len = 0, n = 0;
        double rs = 0, ri = 0, rd = 0;
        for (const auto i : test) {
          const auto& hyp = d.record(i).asr_hypothesis;
          if (!hyp) continue;
          const auto ref = d.tokens(i);
          const auto h = normalize_transcript(*hyp);
          // Pick the triple the aligner must produce: it is optimal, so any
          // optimal triple has the same total; compare totals only.
          const auto a = wer_align(ref, h);
          EXPECT_EQ(a.edits(), oracle::min_edit_cost(ref, h));
          s += a.substitutions;
          ins += a.insertions;
          del += a.deletions;
          len += ref.size();
          rs += static_cast<double>(a.substitutions) / static_cast<double>(ref.size());
          ri += static_cast<double>(a.insertions) / static_cast<double>(ref.size());
          rd += static_cast<double>(a.deletions) / static_cast<double>(ref.size());
          ++n;
        }
        const UWerParams p{w("alpha", 0.05), w("beta", 0.05), w("gamma", 0.4)};
        if (n == 0) {
          values.push_back(0.0);
        } else if (w("macro", 0.0) == 1.0) {
          values.push_back(u_wer(rs / n, ri / n, rd / n, p));
        } else {
          const double L = static_cast<double>(len);
          values.push_back(u_wer(s / L, ins / L, del / L, p));
        }
        break;
      }
      case TermKind::kBleuChallenge: {
        double sum = 0.0;
        for (const auto& t : test_distinct) sum += oracle::sentence_bleu(t, comp_distinct, orders);
        values.push_back(test_distinct.empty() || comp_distinct.empty()
                             ? 0.0
                             : -sum / static_cast<double>(test_distinct.size()));
        break;
      }
      case TermKind::kNgramOverlap: {
        double v = 0.0;
        for (std::size_t n = 1; n <= 4; ++n) {
          if (orders[n - 1] == 0.0) continue;
          double sum = 0.0;
          std::size_t count = 0;
          for (const auto i : test) {
            if (d.tokens(i).size() < n) continue;
            const auto [m, total] = oracle::clipped(d.tokens(i), comp_distinct, n);
            sum += static_cast<double>(m) / static_cast<double>(total);
            ++count;
          }
          if (count > 0) v += orders[n - 1] * sum / static_cast<double>(count);
        }
        values.push_back(v);
        break;
      }
    }
  }
  return values;
}

ObjectiveConfig all_terms(BlockKind kind) {
  ObjectiveConfig c;
  if (kind == BlockKind::kSpeaker) {
    c.terms.push_back(term(TermKind::kDemographicKl, Direction::kMinimize, 1.0));
  }
  c.terms.push_back(term(TermKind::kIntentKl, Direction::kMinimize, 0.7));
  c.terms.push_back(term(TermKind::kLengthKl, Direction::kMinimize, 0.3));
  c.terms.push_back(term(TermKind::kWerChallenge, Direction::kMaximize, 2.0));
  c.terms.push_back(term(TermKind::kWerChallenge, Direction::kMaximize, 1.0,
                         {{"macro", 1.0}, {"gamma", 0.1}}));
  c.terms.push_back(term(TermKind::kBleuChallenge, Direction::kMaximize, 1.5));
  c.terms.push_back(term(TermKind::kNgramOverlap, Direction::kMaximize, 0.5,
                         {{"w1", 0.2}, {"w2", 0.3}, {"w3", 0.4}, {"w4", 0.1}}));
  c.constraints.block_kind = kind;
  return c;
}

class ObjectiveOracle : public ::testing::TestWithParam<BlockKind> {};

TEST_P(ObjectiveOracle, EvaluateMatchesBruteForce) {
  const auto kind = GetParam();
  const auto d = fixtures::random_dataset(21, 12, 6, 10);
  auto config = all_terms(kind);
  config.constraints.target_size = 20;
  // Hold whole blocks back as immovable background, as the pipeline does.
  std::vector<std::size_t> movable, background;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto key = kind == BlockKind::kSpeaker ? d.speaker_of(i) : d.transcript_of(i);
    (key % 4 == 1 ? background : movable).push_back(i);
  }
  Objective objective(d, build_blocks(d, kind, movable), background, config);
  Rng rng(1);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<char> in(objective.blocks().size());
    for (auto& x : in) x = rng.bernoulli(0.3) ? 1 : 0;
    const auto cand = objective.candidate_from(in);
    std::vector<std::size_t> test, comp = background;
    for (std::size_t b = 0; b < in.size(); ++b) {
      auto& side = in[b] ? test : comp;
      side.insert(side.end(), objective.blocks()[b].members.begin(),
                  objective.blocks()[b].members.end());
    }
    if (test.empty()) continue;
    const auto expected = brute_terms(d, config, test, comp);
    const auto got = objective.term_values(cand);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t t = 0; t < got.size(); ++t) {
      ASSERT_NEAR(got[t], expected[t], 1e-9) << "term " << t << " trial " << trial;
    }
    double score = 0.0;
    for (std::size_t t = 0; t < got.size(); ++t) {
      const auto& tm = config.terms[t];
      score += tm.weight * (tm.direction == Direction::kMaximize ? expected[t] : -expected[t]);
    }
    ASSERT_NEAR(objective.evaluate(cand), score, 1e-9);
  }
}

TEST_P(ObjectiveOracle, IncrementalStateIsBitIdenticalToEvaluate) {
  const auto kind = GetParam();
  const auto d = fixtures::random_dataset(5, 10, 7, 9);
  auto config = all_terms(kind);
  config.constraints.target_size = 15;
  Objective objective(d, build_blocks(d, kind, iota(d.size())), {}, config);
  SearchState state(objective);
  Rng rng(2);
  for (int step = 0; step < 300; ++step) {
    const auto b = rng.below(objective.blocks().size());
    state.in_test(b) ? state.remove(b) : state.add(b);
    const auto cand = objective.candidate_from(state.membership());
    ASSERT_EQ(state.score(), objective.evaluate(cand)) << "step " << step;
    ASSERT_EQ(state.term_values(), objective.term_values(cand));
  }
}

INSTANTIATE_TEST_SUITE_P(BothBlockKinds, ObjectiveOracle,
                         ::testing::Values(BlockKind::kSpeaker, BlockKind::kTranscript),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(BuildBlocks, GroupsAndTalliesFeatures) {
  const auto d = fixtures::make_dataset({{"u1", "s1", "a b", "x", "a c"},
                                         {"u2", "s1", "a b", "x"},
                                         {"u3", "s2", "c", "y", "c"},
                                         {"u4", "s2", "a b", "y"}});
  const auto speakers = build_blocks(d, BlockKind::kSpeaker, iota(4));
  ASSERT_EQ(speakers.size(), 2u);
  EXPECT_EQ(speakers[0].id, "s1");
  EXPECT_EQ(speakers[0].members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(speakers[0].transcripts.size(), 1u);
  EXPECT_EQ(speakers[0].transcripts[0].second, 2u);
  EXPECT_EQ(speakers[0].with_hypothesis, 1u);
  EXPECT_EQ(speakers[0].alignment, (AlignmentCounts{1, 0, 0, 2}));
  const auto transcripts = build_blocks(d, BlockKind::kTranscript, std::vector<std::size_t>{0, 2, 3});
  ASSERT_EQ(transcripts.size(), 2u);
  EXPECT_EQ(transcripts[0].id, "a b");
  EXPECT_EQ(transcripts[0].members, (std::vector<std::size_t>{0, 3}));
  EXPECT_EQ(transcripts[0].speakers.size(), 2u);
}

TEST(Objective, ConstraintViolationsNameTheCulprit) {
  const auto d = fixtures::make_dataset({{"u1", "s1", "only here", "x"},
                                         {"u2", "s1", "shared", "x"},
                                         {"u3", "s2", "shared", "x"},
                                         {"u4", "s3", "shared", "y"}});
  ObjectiveConfig c;
  c.terms = {term(TermKind::kIntentKl, Direction::kMinimize, 1.0)};
  c.constraints.block_kind = BlockKind::kSpeaker;
  c.constraints.target_size = 2;
  c.constraints.size_tolerance = 0;
  c.constraints.require_full_transcript_coverage = true;
  Objective objective(d, build_blocks(d, BlockKind::kSpeaker, iota(4)), {}, c);
  EXPECT_EQ(objective.size_tolerance(), 0u);
  const auto bad = objective.check_constraints({{"s1"}, {"s2", "s3"}});
  ASSERT_EQ(bad.size(), 1u);
  EXPECT_NE(bad[0].find("transcript 'only here'"), std::string::npos);
  const auto size = objective.check_constraints({{"s2"}, {"s1", "s3"}});
  ASSERT_EQ(size.size(), 1u);
  EXPECT_NE(size[0].find("test size 1"), std::string::npos);
  EXPECT_TRUE(objective.check_constraints({{"s2", "s3"}, {"s1"}}).empty());
  EXPECT_FALSE(objective.check_constraints({{"s2", "s3"}, {"s2", "s1"}}).empty());
  EXPECT_FALSE(objective.check_constraints({{"s2", "s3"}, {}}).empty());
  EXPECT_THROW(objective.evaluate({{"nobody"}, {}}), ValidationError);
}

TEST(Objective, SpeakerCoverageOnTranscriptBlocks) {
  const auto d = fixtures::make_dataset({{"u1", "s1", "a", "x"},
                                         {"u2", "s2", "b", "x"},
                                         {"u3", "s2", "c", "x"}});
  ObjectiveConfig c;
  c.terms = {term(TermKind::kLengthKl, Direction::kMinimize, 1.0)};
  c.constraints.block_kind = BlockKind::kTranscript;
  c.constraints.target_size = 1;
  c.constraints.require_full_speaker_coverage = true;
  Objective objective(d, build_blocks(d, BlockKind::kTranscript, iota(3)), {}, c);
  const auto v = objective.check_constraints({{"a"}, {"b", "c"}});
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("speaker 's1'"), std::string::npos);
  EXPECT_TRUE(objective.check_constraints({{"b"}, {"a", "c"}}).empty());
}

TEST(Objective, ValidationRejectsBadConfigs) {
  const auto d = fixtures::make_dataset({{"u1", "s1", "a", "x"}, {"u2", "s2", "b", "x"}});
  auto make = [&](ObjectiveConfig c, BlockKind kind = BlockKind::kSpeaker) {
    c.constraints.block_kind = kind;
    c.constraints.target_size = 1;
    return Objective(d, build_blocks(d, kind, iota(2)), {}, c);
  };
  ObjectiveConfig c;
  EXPECT_THROW(make(c), ValidationError);  // no terms
  c.terms = {term(TermKind::kDemographicKl, Direction::kMinimize, 1.0)};
  EXPECT_NO_THROW(make(c));
  EXPECT_THROW(make(c, BlockKind::kTranscript), ValidationError);
  c.terms = {term(TermKind::kWerChallenge, Direction::kMaximize, 1.0)};
  EXPECT_THROW(make(c), ValidationError);  // no hypotheses
  c.terms = {term(TermKind::kIntentKl, Direction::kMinimize, -1.0)};
  EXPECT_THROW(make(c), ValidationError);
  c.terms = {term(TermKind::kNgramOverlap, Direction::kMaximize, 1.0, {{"w1", 0.9}})};
  EXPECT_THROW(make(c), ValidationError);  // weights sum to 1.4
  c.terms = {term(TermKind::kNgramOverlap, Direction::kMaximize, 1.0, {{"alpha", 0.1}})};
  EXPECT_THROW(make(c), ValidationError);
  c.terms = {term(TermKind::kIntentKl, Direction::kMinimize, 1.0)};
  c.constraints.require_full_transcript_coverage = true;
  EXPECT_THROW(make(c, BlockKind::kTranscript), ValidationError);
  c.constraints.require_full_transcript_coverage = false;
  c.constraints.target_size = 2;
  EXPECT_THROW(Objective(d, build_blocks(d, BlockKind::kSpeaker, iota(2)), {}, c),
               ValidationError);
}

TEST(Objective, WerTermRanksNoisySpeakersHigher) {
  // Planted rates: s_noisy substitutes one of four tokens, s_clean none.
  std::vector<fixtures::Row> rows;
  for (int i = 0; i < 4; ++i) {
    rows.push_back({"n" + std::to_string(i), "s_noisy", "turn on the lights", "a",
                    "turn on zzz lights"});
    rows.push_back({"c" + std::to_string(i), "s_clean", "turn on the lights", "a",
                    "turn on the lights"});
    rows.push_back({"o" + std::to_string(i), "s_other", "turn on the lights", "a",
                    "turn on the lights"});
  }
  const auto d = fixtures::make_dataset(rows);
  ObjectiveConfig c;
  c.terms = {term(TermKind::kWerChallenge, Direction::kMaximize, 1.0)};
  c.constraints.target_size = 4;
  Objective objective(d, build_blocks(d, BlockKind::kSpeaker, iota(d.size())), {}, c);
  EXPECT_GT(objective.evaluate({{"s_noisy"}, {"s_clean", "s_other"}}),
            objective.evaluate({{"s_clean"}, {"s_noisy", "s_other"}}));
  EXPECT_DOUBLE_EQ(objective.term_values({{"s_noisy"}, {"s_clean", "s_other"}})[0], 0.25);
}

TEST(Objective, CalibrateScalesTermsToUnitRange) {
  const auto d = fixtures::random_dataset(8, 8, 5);
  ObjectiveConfig c;
  c.terms = {term(TermKind::kIntentKl, Direction::kMinimize, 1.0),
             term(TermKind::kLengthKl, Direction::kMinimize, 1.0)};
  c.normalize = true;
  c.constraints.target_size = 10;
  Objective objective(d, build_blocks(d, BlockKind::kSpeaker, iota(d.size())), {}, c);
  std::vector<CandidateSplit> samples;
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    std::vector<char> in(objective.blocks().size());
    for (auto& x : in) x = rng.bernoulli(0.3) ? 1 : 0;
    in[static_cast<std::size_t>(i) % in.size()] = 1;
    samples.push_back(objective.candidate_from(in));
  }
  objective.calibrate(samples);
  for (const auto& s : samples) {
    const double score = objective.evaluate(s);
    EXPECT_GE(score, -2.0 - 1e-12);
    EXPECT_LE(score, 0.0 + 1e-12);
  }
}

}  // namespace
}  // namespace splitforge
