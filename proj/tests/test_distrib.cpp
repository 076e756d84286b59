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

#include "splitforge/distrib.hpp"

#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include "splitforge/rng.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace splitforge {
namespace {

std::set<std::string> keys(std::size_t n) {
  std::set<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.insert("k" + std::to_string(i));
  return out;
}

TEST(FromCounts, SmoothsOverTheUnionSupport) {
  const auto d = from_counts({{"a", 3.0}, {"b", 1.0}}, {"a", "b", "c"}, 0.5);
  EXPECT_DOUBLE_EQ(d.probability("a"), 3.5 / 5.5);
  EXPECT_DOUBLE_EQ(d.probability("c"), 0.5 / 5.5);
  EXPECT_EQ(d.support(), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(d.probability("z"), std::out_of_range);
  EXPECT_THROW(from_counts({{"z", 1.0}}, {"a"}), std::invalid_argument);
  EXPECT_THROW(from_counts({}, {}), std::invalid_argument);
  EXPECT_THROW(from_counts({{"a", -1.0}}, {"a"}), std::invalid_argument);
  EXPECT_THROW(from_counts({{"a", 1.0}}, {"a"}, 0.0), std::invalid_argument);
}

TEST(SymmetrisedKl, ReferenceCase) {
  const auto p = from_counts({{"x", 1.0}, {"y", 1.0}}, {"x", "y"});
  const auto q = from_counts({{"x", 1.0}, {"y", 3.0}}, {"x", "y"});
  const double direct = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75) +
                        0.25 * std::log(0.25 / 0.5) + 0.75 * std::log(0.75 / 0.5);
  EXPECT_NEAR(symmetrised_kl(p, q), direct, 1e-5);
  EXPECT_NEAR(symmetrised_kl(p, q), 0.2746, 1e-4);
}

TEST(SymmetrisedKl, PropertiesOnRandomPairs) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto k = 1 + rng.below(6);
    const auto support = keys(k);
    std::map<std::string, double> a, b;
    std::vector<double> va, vb;
    for (const auto& key : support) {
      va.push_back(static_cast<double>(rng.below(5)));
      vb.push_back(static_cast<double>(rng.below(5)));
      a[key] = va.back();
      b[key] = vb.back();
    }
    const auto p = from_counts(a, support);
    const auto q = from_counts(b, support);
    const double pq = symmetrised_kl(p, q);
    EXPECT_GE(pq, 0.0);
    EXPECT_NEAR(pq, symmetrised_kl(q, p), 1e-12);
    EXPECT_EQ(symmetrised_kl(p, p), 0.0);
    EXPECT_NEAR(pq, oracle::jeffreys(va, vb, kDefaultSmoothing), 1e-9 * std::max(1.0, pq));
    EXPECT_NEAR(symmetrised_kl_counts(va, vb, kDefaultSmoothing), pq, 1e-9 * std::max(1.0, pq));
  }
}

TEST(SymmetrisedKl, RejectsDifferentSupports) {
  const auto p = from_counts({}, {"a", "b"});
  const auto q = from_counts({}, {"a", "c"});
  EXPECT_THROW(symmetrised_kl(p, q), std::invalid_argument);
  const std::vector<double> two{1, 2}, three{1, 2, 3};
  EXPECT_THROW(symmetrised_kl_counts(two, three, 1e-6), std::invalid_argument);
}

splitforge::Dataset four_speakers() {
  return fixtures::make_dataset(
      {{"u1", "s1", "a", "x"}, {"u2", "s1", "b", "x"}, {"u3", "s2", "a", "x"},
       {"u4", "s3", "a", "x"}, {"u5", "s4", "a", "x"}},
      {{"s1", {{"g", "f"}, {"l", "en"}}},
       {"s2", {{"g", "m"}, {"l", "en"}}},
       {"s3", {{"g", "f"}, {"l", "fr"}}},
       {"s4", {{"g", "f"}, {"l", "en"}}}});
}

TEST(Demographics, JointCountsOneEntryPerSpeaker) {
  const auto d = four_speakers();
  // s1 has two utterances but counts once.
  const auto dist = demographic_distribution(d, {0, 1}, DemographicMode::kJoint, 1e-9);
  ASSERT_EQ(dist.size(), 1u);
  // Support covers every tuple in the dataset: (f,en) (f,fr) (m,en).
  EXPECT_EQ(dist[0].support().size(), 3u);
  EXPECT_NEAR(dist[0].probabilities()[0], 0.5, 1e-8);
  EXPECT_NEAR(dist[0].probabilities()[1], 0.0, 1e-8);
  EXPECT_NEAR(dist[0].probabilities()[2], 0.5, 1e-8);
}

TEST(Demographics, MarginalModeSumsPerAttribute) {
  const auto d = four_speakers();
  const std::set<std::size_t> a{0, 1}, b{2, 3};
  const auto marginal = demographic_distribution(d, a, DemographicMode::kMarginal);
  ASSERT_EQ(marginal.size(), 2u);
  const double expected =
      oracle::jeffreys({1, 1}, {2, 0}, kDefaultSmoothing) +   // g: f, m
      oracle::jeffreys({2, 0}, {1, 1}, kDefaultSmoothing);    // l: en, fr
  EXPECT_NEAR(demographic_kl(d, a, b, DemographicMode::kMarginal), expected, 1e-9);
  const double joint = oracle::jeffreys({1, 0, 1}, {1, 1, 0}, kDefaultSmoothing);
  EXPECT_NEAR(demographic_kl(d, a, b), joint, 1e-9);
  EXPECT_EQ(demographic_keys(d, 1, DemographicMode::kMarginal),
            (std::vector<std::string>{"g=m", "l=en"}));
  EXPECT_THROW(demographic_distribution(d, {}), std::invalid_argument);
}

}  // namespace
}  // namespace splitforge
