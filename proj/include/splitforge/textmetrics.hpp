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

#ifndef SPLITFORGE_TEXTMETRICS_HPP_
#define SPLITFORGE_TEXTMETRICS_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "splitforge/manifest.hpp"

namespace splitforge {

inline constexpr std::size_t kMaxNgramOrder = 4;

enum class Parallelism { kSerial, kParallel };

// Edit counts of a minimum-cost token alignment. Aggregates are formed
// with operator+=.
struct AlignmentCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t reference_length = 0;

  std::size_t edits() const { return substitutions + insertions + deletions; }

  AlignmentCounts& operator+=(const AlignmentCounts& other) {
    substitutions += other.substitutions;
    insertions += other.insertions;
    deletions += other.deletions;
    reference_length += other.reference_length;
    return *this;
  }
  AlignmentCounts& operator-=(const AlignmentCounts& other) {
    substitutions -= other.substitutions;
    insertions -= other.insertions;
    deletions -= other.deletions;
    reference_length -= other.reference_length;
    return *this;
  }

  friend bool operator==(const AlignmentCounts&,
                         const AlignmentCounts&) = default;
};

// Unit-cost Levenshtein alignment of hypothesis against reference.
// Among minimum-cost alignments the traceback (from the end) prefers a
// match, then substitution, then insertion, then deletion. Throws
// std::invalid_argument if the reference is empty.
AlignmentCounts wer_align(std::span<const std::string> reference,
                          std::span<const std::string> hypothesis);

struct WerRates {
  double substitution = 0.0;
  double insertion = 0.0;
  double deletion = 0.0;
  double wer = 0.0;
};

// Every rate is the count divided by reference_length.
WerRates wer_rates(const AlignmentCounts& counts);

enum class WerAveraging { kMicro, kMacro };

// kMicro sums the counts and divides once; kMacro averages per-item rates.
WerRates wer_rates(std::span<const AlignmentCounts> items,
                   WerAveraging averaging = WerAveraging::kMicro);

struct UWerParams {
  double alpha = 0.05;  // |I - D| penalty
  double beta = 0.05;   // insertion penalty
  double gamma = 0.4;   // deletion penalty
};

// Challenge-speaker utility: S - alpha|I - D| - beta I - gamma D.
double u_wer(double s_rate, double i_rate, double d_rate,
             const UWerParams& params = {});
inline double u_wer(const WerRates& rates, const UWerParams& params = {}) {
  return u_wer(rates.substitution, rates.insertion, rates.deletion, params);
}

using NGram = std::vector<std::string>;

// n-gram multisets of orders 1..4 over one or more sentences.
struct NGramProfile {
  std::array<std::map<NGram, std::size_t>, kMaxNgramOrder> counts;
  std::size_t token_count = 0;

  void add(std::span<const std::string> tokens);
  // Total n-grams of the given order (1-based), counted with multiplicity.
  std::size_t total(std::size_t order) const;
};

NGramProfile ngram_profile(std::span<const std::string> tokens);

using BleuWeights = std::array<double, kMaxNgramOrder>;

// Brevity-penalized weighted geometric mean of clipped modified n-gram
// precisions. A zero precision at any order with positive weight makes
// the score 0 (an order with no candidate n-grams has zero precision).
// The brevity penalty uses the closest reference length, ties going to
// the shorter reference. Throws std::invalid_argument on an empty
// candidate, no references, or weights that are negative or do not sum
// to 1 within 1e-9.
double sentence_bleu(std::span<const std::string> candidate,
                     std::span<const Tokens> references,
                     const BleuWeights& weights);

// Challenge-utterance utility: the negated sentence BLEU.
double u_bleu(std::span<const std::string> candidate,
              std::span<const Tokens> references, const BleuWeights& weights);

// Mean over test transcripts (those with at least `order` tokens) of the
// order-n clipped modified precision against the whole train pool, as a
// percentage. Throws std::invalid_argument for an empty test set or an
// order outside 1..4, and std::domain_error when no test transcript is
// long enough for the order.
double corpus_ngram_overlap(std::span<const Tokens> test,
                            std::span<const Tokens> train, std::size_t order,
                            Parallelism parallelism = Parallelism::kParallel);

}  // namespace splitforge

#endif  // SPLITFORGE_TEXTMETRICS_HPP_
