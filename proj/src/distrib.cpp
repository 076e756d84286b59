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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace splitforge {

double DiscreteDistribution::probability(const std::string& key) const {
  const auto it = std::lower_bound(support_.begin(), support_.end(), key);
  if (it == support_.end() || *it != key) {
    throw std::out_of_range("distribution: key '" + key + "' not in support");
  }
  return probabilities_[static_cast<std::size_t>(it - support_.begin())];
}

DiscreteDistribution from_counts(const std::map<std::string, double>& counts,
                                 const std::set<std::string>& union_support,
                                 double epsilon) {
  if (union_support.empty()) {
    throw std::invalid_argument("from_counts: empty support");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("from_counts: epsilon must be positive");
  }
  double total = 0.0;
  for (const auto& [key, count] : counts) {
    if (!union_support.contains(key)) {
      throw std::invalid_argument("from_counts: key '" + key +
                                  "' outside the support");
    }
    if (count < 0.0) throw std::invalid_argument("from_counts: negative count");
    total += count;
  }
  DiscreteDistribution d;
  d.epsilon_ = epsilon;
  d.support_.assign(union_support.begin(), union_support.end());
  const double denominator =
      total + epsilon * static_cast<double>(union_support.size());
  for (const auto& key : d.support_) {
    const auto it = counts.find(key);
    const double count = it == counts.end() ? 0.0 : it->second;
    d.probabilities_.push_back((count + epsilon) / denominator);
  }
  return d;
}

double symmetrised_kl(const DiscreteDistribution& p,
                      const DiscreteDistribution& q) {
  if (p.support() != q.support()) {
    throw std::invalid_argument("symmetrised_kl: supports differ");
  }
  double sum = 0.0;
  const auto& pp = p.probabilities();
  const auto& qq = q.probabilities();
  for (std::size_t i = 0; i < pp.size(); ++i) {
    // p ln(p/q) + q ln(q/p) = (p - q) ln(p/q), non-negative termwise.
    sum += (pp[i] - qq[i]) * std::log(pp[i] / qq[i]);
  }
  return sum;
}

double symmetrised_kl_counts(std::span<const double> p_counts,
                             std::span<const double> q_counts, double epsilon) {
  if (p_counts.size() != q_counts.size() || p_counts.empty()) {
    throw std::invalid_argument("symmetrised_kl_counts: support mismatch");
  }
  const auto k = static_cast<double>(p_counts.size());
  double p_total = 0.0;
  double q_total = 0.0;
  for (std::size_t i = 0; i < p_counts.size(); ++i) {
    p_total += p_counts[i];
    q_total += q_counts[i];
  }
  const double p_den = p_total + epsilon * k;
  const double q_den = q_total + epsilon * k;
  double sum = 0.0;
  for (std::size_t i = 0; i < p_counts.size(); ++i) {
    const double p = (p_counts[i] + epsilon) / p_den;
    const double q = (q_counts[i] + epsilon) / q_den;
    sum += (p - q) * std::log(p / q);
  }
  return sum;
}

std::vector<std::string> demographic_keys(const Dataset& dataset, std::size_t s,
                                          DemographicMode mode) {
  const auto& names = dataset.attribute_names();
  const auto& values = dataset.demographics(s);
  if (mode == DemographicMode::kJoint) {
    std::string key;
    for (std::size_t a = 0; a < values.size(); ++a) {
      if (a) key += '\x1f';
      key += values[a];
    }
    return {key};
  }
  std::vector<std::string> keys;
  for (std::size_t a = 0; a < values.size(); ++a) {
    keys.push_back(names[a] + "=" + values[a]);
  }
  return keys;
}

std::vector<DiscreteDistribution> demographic_distribution(
    const Dataset& dataset, const std::set<std::size_t>& speakers,
    DemographicMode mode, double epsilon) {
  if (speakers.empty()) {
    throw std::invalid_argument("demographic_distribution: empty speaker set");
  }
  // Channel 0 in joint mode; one channel per attribute in marginal mode.
  const std::size_t channels =
      mode == DemographicMode::kJoint
          ? 1
          : std::max<std::size_t>(1, dataset.attribute_names().size());
  std::vector<std::set<std::string>> support(channels);
  for (std::size_t s = 0; s < dataset.speaker_count(); ++s) {
    const auto keys = demographic_keys(dataset, s, mode);
    for (std::size_t c = 0; c < keys.size(); ++c) support[c].insert(keys[c]);
  }
  std::vector<std::map<std::string, double>> counts(channels);
  for (const auto s : speakers) {
    const auto keys = demographic_keys(dataset, s, mode);
    for (std::size_t c = 0; c < keys.size(); ++c) counts[c][keys[c]] += 1.0;
  }
  std::vector<DiscreteDistribution> out;
  for (std::size_t c = 0; c < channels; ++c) {
    // A dataset without attributes has the single empty tuple.
    if (support[c].empty()) support[c].insert("");
    if (counts[c].empty() && dataset.attribute_names().empty()) {
      counts[c][""] = static_cast<double>(speakers.size());
    }
    out.push_back(from_counts(counts[c], support[c], epsilon));
  }
  return out;
}

double demographic_kl(const Dataset& dataset,
                      const std::set<std::size_t>& first,
                      const std::set<std::size_t>& second,
                      DemographicMode mode, double epsilon) {
  const auto p = demographic_distribution(dataset, first, mode, epsilon);
  const auto q = demographic_distribution(dataset, second, mode, epsilon);
  double sum = 0.0;
  for (std::size_t c = 0; c < p.size(); ++c) sum += symmetrised_kl(p[c], q[c]);
  return sum;
}

}  // namespace splitforge
