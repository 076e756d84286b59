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

#include "splitforge/textmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace splitforge {

AlignmentCounts wer_align(std::span<const std::string> reference,
                          std::span<const std::string> hypothesis) {
  if (reference.empty()) {
    throw std::invalid_argument("wer_align: empty reference");
  }
  const std::size_t rows = reference.size() + 1;
  const std::size_t cols = hypothesis.size() + 1;
  std::vector<std::uint32_t> cost(rows * cols);
  auto at = [&](std::size_t i, std::size_t j) -> std::uint32_t& {
    return cost[i * cols + j];
  };
  for (std::size_t i = 0; i < rows; ++i) at(i, 0) = static_cast<std::uint32_t>(i);
  for (std::size_t j = 0; j < cols; ++j) at(0, j) = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i < rows; ++i) {
    for (std::size_t j = 1; j < cols; ++j) {
      const std::uint32_t diagonal =
          at(i - 1, j - 1) + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      at(i, j) = std::min({diagonal, at(i, j - 1) + 1, at(i - 1, j) + 1});
    }
  }

  AlignmentCounts counts;
  counts.reference_length = reference.size();
  std::size_t i = rows - 1;
  std::size_t j = cols - 1;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && reference[i - 1] == hypothesis[j - 1] &&
        at(i, j) == at(i - 1, j - 1)) {
      --i;
      --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      ++counts.substitutions;
      --i;
      --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++counts.insertions;
      --j;
    } else {
      ++counts.deletions;
      --i;
    }
  }
  return counts;
}

WerRates wer_rates(const AlignmentCounts& counts) {
  if (counts.reference_length == 0) {
    throw std::invalid_argument("wer_rates: zero reference length");
  }
  const auto n = static_cast<double>(counts.reference_length);
  return {static_cast<double>(counts.substitutions) / n,
          static_cast<double>(counts.insertions) / n,
          static_cast<double>(counts.deletions) / n,
          static_cast<double>(counts.edits()) / n};
}

WerRates wer_rates(std::span<const AlignmentCounts> items,
                   WerAveraging averaging) {
  if (averaging == WerAveraging::kMicro) {
    AlignmentCounts total;
    for (const auto& item : items) total += item;
    return wer_rates(total);
  }
  if (items.empty()) throw std::invalid_argument("wer_rates: no items");
  WerRates sum;
  for (const auto& item : items) {
    const auto r = wer_rates(item);
    sum.substitution += r.substitution;
    sum.insertion += r.insertion;
    sum.deletion += r.deletion;
    sum.wer += r.wer;
  }
  const auto n = static_cast<double>(items.size());
  return {sum.substitution / n, sum.insertion / n, sum.deletion / n, sum.wer / n};
}

double u_wer(double s_rate, double i_rate, double d_rate,
             const UWerParams& params) {
  if (s_rate < 0 || i_rate < 0 || d_rate < 0) {
    throw std::invalid_argument("u_wer: negative rate");
  }
  if (params.alpha < 0 || params.beta < 0 || params.gamma < 0) {
    throw std::invalid_argument("u_wer: negative hyperparameter");
  }
  return s_rate - params.alpha * std::abs(i_rate - d_rate) -
         params.beta * i_rate - params.gamma * d_rate;
}

void NGramProfile::add(std::span<const std::string> tokens) {
  token_count += tokens.size();
  for (std::size_t n = 1; n <= kMaxNgramOrder; ++n) {
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      ++counts[n - 1][NGram(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                            tokens.begin() + static_cast<std::ptrdiff_t>(start + n))];
    }
  }
}

std::size_t NGramProfile::total(std::size_t order) const {
  std::size_t sum = 0;
  for (const auto& [gram, count] : counts.at(order - 1)) sum += count;
  return sum;
}

NGramProfile ngram_profile(std::span<const std::string> tokens) {
  NGramProfile profile;
  profile.add(tokens);
  return profile;
}

namespace {

void check_weights(const BleuWeights& weights) {
  double sum = 0.0;
  for (const double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("bleu: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("bleu: weights must sum to 1");
  }
}

// Per order, the maximum count of each n-gram over a set of sentences.
using ClipTable = std::array<std::map<NGram, std::size_t>, kMaxNgramOrder>;

void merge_max(ClipTable& table, const NGramProfile& profile) {
  for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
    for (const auto& [gram, count] : profile.counts[k]) {
      auto& slot = table[k][gram];
      slot = std::max(slot, count);
    }
  }
}

// (clipped matches, candidate n-grams) at one order.
std::pair<std::size_t, std::size_t> clipped_matches(
    const std::map<NGram, std::size_t>& candidate,
    const std::map<NGram, std::size_t>& clip) {
  std::size_t matched = 0;
  std::size_t total = 0;
  for (const auto& [gram, count] : candidate) {
    total += count;
    const auto it = clip.find(gram);
    if (it != clip.end()) matched += std::min(count, it->second);
  }
  return {matched, total};
}

}  // namespace

double sentence_bleu(std::span<const std::string> candidate,
                     std::span<const Tokens> references,
                     const BleuWeights& weights) {
  if (candidate.empty()) throw std::invalid_argument("bleu: empty candidate");
  if (references.empty()) throw std::invalid_argument("bleu: no references");
  check_weights(weights);

  ClipTable clip;
  for (const auto& ref : references) merge_max(clip, ngram_profile(ref));
  const auto cand = ngram_profile(candidate);

  double log_sum = 0.0;
  for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
    if (weights[k] == 0.0) continue;
    const auto [matched, total] = clipped_matches(cand.counts[k], clip[k]);
    if (matched == 0) return 0.0;
    log_sum += weights[k] * std::log(static_cast<double>(matched) /
                                     static_cast<double>(total));
  }

  const auto c = candidate.size();
  std::size_t closest = references.front().size();
  for (const auto& ref : references) {
    const auto r = ref.size();
    const auto dr = r > c ? r - c : c - r;
    const auto dbest = closest > c ? closest - c : c - closest;
    if (dr < dbest || (dr == dbest && r < closest)) closest = r;
  }
  const double bp =
      closest > c ? std::exp(1.0 - static_cast<double>(closest) /
                                       static_cast<double>(c))
                  : 1.0;
  return bp * std::exp(log_sum);
}

double u_bleu(std::span<const std::string> candidate,
              std::span<const Tokens> references, const BleuWeights& weights) {
  return -sentence_bleu(candidate, references, weights);
}

double corpus_ngram_overlap(std::span<const Tokens> test,
                            std::span<const Tokens> train, std::size_t order,
                            Parallelism parallelism) {
  if (test.empty()) throw std::invalid_argument("ngram overlap: empty test set");
  if (order < 1 || order > kMaxNgramOrder) {
    throw std::invalid_argument("ngram overlap: order must be in 1..4");
  }
  std::map<NGram, std::size_t> clip;
  for (const auto& sentence : train) {
    NGramProfile profile;
    profile.add(sentence);
    for (const auto& [gram, count] : profile.counts[order - 1]) {
      auto& slot = clip[gram];
      slot = std::max(slot, count);
    }
  }

  // NaN marks transcripts too short for the order.
  const auto n = static_cast<std::int64_t>(test.size());
  std::vector<double> precision(test.size());
#pragma omp parallel for schedule(dynamic, 64) if (parallelism == Parallelism::kParallel)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& sentence = test[static_cast<std::size_t>(i)];
    if (sentence.size() < order) {
      precision[static_cast<std::size_t>(i)] =
          std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const auto profile = ngram_profile(sentence);
    const auto [matched, total] =
        clipped_matches(profile.counts[order - 1], clip);
    precision[static_cast<std::size_t>(i)] =
        static_cast<double>(matched) / static_cast<double>(total);
  }

  double sum = 0.0;
  std::size_t used = 0;
  for (const double p : precision) {
    if (std::isnan(p)) continue;
    sum += p;
    ++used;
  }
  if (used == 0) {
    throw std::domain_error("ngram overlap: no test transcript has " +
                            std::to_string(order) + " tokens");
  }
  return 100.0 * sum / static_cast<double>(used);
}

}  // namespace splitforge
