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

#ifndef SPLITFORGE_DISTRIB_HPP_
#define SPLITFORGE_DISTRIB_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "splitforge/manifest.hpp"

namespace splitforge {

inline constexpr double kDefaultSmoothing = 1e-6;

// Additively smoothed categorical distribution over an explicit support.
// Every probability is strictly positive.
class DiscreteDistribution {
 public:
  const std::vector<std::string>& support() const { return support_; }
  const std::vector<double>& probabilities() const { return probabilities_; }
  double epsilon() const { return epsilon_; }
  double probability(const std::string& key) const;

 private:
  friend DiscreteDistribution from_counts(const std::map<std::string, double>&,
                                          const std::set<std::string>&, double);
  std::vector<std::string> support_;  // sorted
  std::vector<double> probabilities_;
  double epsilon_ = kDefaultSmoothing;
};

// p(k) = (count(k) + eps) / (total + eps * |support|). Throws
// std::invalid_argument when the support is empty, eps is not positive,
// a count is negative, or a counted key lies outside the support.
DiscreteDistribution from_counts(const std::map<std::string, double>& counts,
                                 const std::set<std::string>& union_support,
                                 double epsilon = kDefaultSmoothing);

// KL(p||q) + KL(q||p) in nats. Throws std::invalid_argument when the
// supports differ.
double symmetrised_kl(const DiscreteDistribution& p,
                      const DiscreteDistribution& q);

// Same quantity on raw count vectors over a shared dense support; the
// objective uses this on its incremental histograms.
double symmetrised_kl_counts(std::span<const double> p_counts,
                             std::span<const double> q_counts, double epsilon);

enum class DemographicMode { kJoint, kMarginal };

// One count per speaker in `speakers` (dense speaker ids), smoothed over
// the support observed across every speaker of the dataset. kJoint yields
// one distribution over attribute tuples; kMarginal yields one per
// attribute. Throws std::invalid_argument on an empty subset.
std::vector<DiscreteDistribution> demographic_distribution(
    const Dataset& dataset, const std::set<std::size_t>& speakers,
    DemographicMode mode = DemographicMode::kJoint,
    double epsilon = kDefaultSmoothing);

// Sum of symmetrised_kl over the paired distributions returned by
// demographic_distribution for two speaker sets.
double demographic_kl(const Dataset& dataset,
                      const std::set<std::size_t>& first,
                      const std::set<std::size_t>& second,
                      DemographicMode mode = DemographicMode::kJoint,
                      double epsilon = kDefaultSmoothing);

// Category keys of speaker s: the joint tuple key in kJoint mode, or one
// "name=value" key per attribute in kMarginal mode.
std::vector<std::string> demographic_keys(const Dataset& dataset, std::size_t s,
                                          DemographicMode mode);

}  // namespace splitforge

#endif  // SPLITFORGE_DISTRIB_HPP_
