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

#ifndef SPLITFORGE_OBJECTIVE_HPP_
#define SPLITFORGE_OBJECTIVE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "splitforge/distrib.hpp"
#include "splitforge/manifest.hpp"
#include "splitforge/textmetrics.hpp"

namespace splitforge {

enum class BlockKind { kSpeaker, kTranscript };

std::string_view to_string(BlockKind kind);
BlockKind block_kind_from_string(std::string_view name);

// Atomic unit of test-set assignment: every utterance of one speaker, or
// every recording of one normalized transcript.
struct Block {
  std::string id;  // speaker id or normalized transcript
  BlockKind kind = BlockKind::kSpeaker;
  std::vector<std::size_t> members;  // record indices, ascending

  // Additive features, as (dense id, utterance count) pairs.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> speakers;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> transcripts;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> intents;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> lengths;  // by token count
  AlignmentCounts alignment;      // summed over members with a hypothesis
  // Per-utterance S/I/D rates summed in fixed point (units of 2^-40) so
  // that adding and removing blocks is exact.
  std::array<std::int64_t, 3> rate_sums{};
  std::size_t with_hypothesis = 0;

  std::size_t size() const { return members.size(); }
};

// One block per speaker (or per normalized transcript) present in the
// pool, ordered by block id.
std::vector<Block> build_blocks(const Dataset& dataset, BlockKind kind,
                                std::span<const std::size_t> pool);

enum class TermKind {
  kDemographicKl,
  kIntentKl,
  kLengthKl,
  kWerChallenge,
  kBleuChallenge,
  kNgramOverlap,
};

std::string_view to_string(TermKind kind);
TermKind term_kind_from_string(std::string_view name);

enum class Direction { kMaximize, kMinimize };

std::string_view to_string(Direction direction);
Direction direction_from_string(std::string_view name);

// Parameter names by kind:
//   wer_challenge:  alpha, beta, gamma (defaults 0.05, 0.05, 0.4), macro (0/1)
//   bleu_challenge: w1..w4 (defaults 0.5, 0.5, 0, 0)
//   ngram_overlap:  w1..w4 (defaults 0.5, 0.5, 0, 0)
//   *_kl:           none
struct UtilityTerm {
  TermKind kind = TermKind::kDemographicKl;
  Direction direction = Direction::kMinimize;
  double weight = 1.0;
  std::map<std::string, double> parameters;
};

struct HardConstraints {
  std::size_t target_size = 0;
  // Unset means "largest block size in the stage". An empty test set
  // never satisfies a positive target.
  std::optional<std::size_t> size_tolerance;
  BlockKind block_kind = BlockKind::kSpeaker;
  bool require_full_transcript_coverage = false;
  bool require_full_speaker_coverage = false;
};

struct ObjectiveConfig {
  std::vector<UtilityTerm> terms;
  HardConstraints constraints;
  // Min-max scale each term before weighting; see Objective::calibrate.
  bool normalize = false;
  double smoothing = kDefaultSmoothing;
  DemographicMode demographic_mode = DemographicMode::kJoint;
};

// Throws ValidationError when the config cannot be evaluated against the
// dataset: no terms, negative or non-finite weights, unknown or invalid
// parameters, a term that does not fit the block kind, wer_challenge
// without any ASR hypotheses, or transcript coverage demanded of
// transcript blocks.
void validate(const ObjectiveConfig& config, const Dataset& dataset);

// Test blocks and the remaining eligible blocks, by block id.
struct CandidateSplit {
  std::set<std::string> test;
  std::set<std::string> complement;

  friend bool operator==(const CandidateSplit&, const CandidateSplit&) = default;
};

struct TermScale {
  double offset = 0.0;
  double scale = 1.0;
};

class SearchState;

// A stage's optimization problem: the movable blocks, the background
// utterances that sit on the complement side but cannot move, and the
// configured utilities and constraints. Immutable after construction
// apart from calibrate(), and safe to share across threads.
class Objective {
 public:
  // Throws ValidationError via validate() and when the target size is
  // not below the stage pool size.
  Objective(const Dataset& dataset, std::vector<Block> blocks,
            std::vector<std::size_t> background, ObjectiveConfig config);
  ~Objective();
  Objective(Objective&&) noexcept;

  const Dataset& dataset() const { return *dataset_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const ObjectiveConfig& config() const { return config_; }
  std::size_t pool_size() const { return pool_size_; }
  std::size_t size_tolerance() const { return tolerance_; }
  std::optional<std::size_t> block_index(std::string_view id) const;

  // Weighted sum of signed (and, if enabled, scaled) term values.
  // Pure and deterministic. Throws ValidationError when the candidate
  // names unknown blocks.
  double evaluate(const CandidateSplit& candidate) const;
  // Raw term values in config order, before sign, weight and scaling.
  std::vector<double> term_values(const CandidateSplit& candidate) const;
  // Violation messages; empty means feasible.
  std::vector<std::string> check_constraints(const CandidateSplit& candidate) const;

  CandidateSplit candidate_from(const std::vector<char>& in_test) const;
  std::vector<char> membership(const CandidateSplit& candidate) const;

  // Fixes per-term min-max scaling from the term values observed on the
  // given candidates. No-op unless config().normalize.
  void calibrate(std::span<const CandidateSplit> samples);
  const std::vector<TermScale>& scales() const { return scales_; }

  double combine(std::span<const double> term_values) const;

 private:
  friend class SearchState;
  struct Tables;

  const Dataset* dataset_;
  std::vector<Block> blocks_;
  std::vector<std::size_t> background_;
  ObjectiveConfig config_;
  std::size_t pool_size_ = 0;
  std::size_t tolerance_ = 0;
  std::vector<TermScale> scales_;
  std::unique_ptr<Tables> tables_;
};

// Incrementally maintained test-side statistics for one candidate.
// Moving a block in or out costs time proportional to the block's
// feature count; score() recomputes the term values from the counts, so
// it is bit-identical to Objective::evaluate on the same candidate.
class SearchState {
 public:
  explicit SearchState(const Objective& objective);

  void add(std::size_t block);
  void remove(std::size_t block);
  bool in_test(std::size_t block) const { return in_test_[block] != 0; }
  const std::vector<char>& membership() const { return in_test_; }
  std::size_t test_size() const { return test_size_; }

  bool size_ok() const;
  bool coverage_ok() const {
    return uncovered_transcripts_ == 0 && uncovered_speakers_ == 0;
  }
  bool feasible() const { return size_ok() && coverage_ok(); }

  std::vector<double> term_values() const;
  double score() const { return objective_->combine(term_values()); }

 private:
  void move(std::size_t block, int sign);
  void set_transcript_presence(std::size_t transcript, int sign);
  double kl_value(std::size_t channel_begin, std::size_t channel_end) const;
  double wer_value(std::size_t term_index) const;
  double bleu_value(const BleuWeights& weights) const;
  double overlap_value(const BleuWeights& weights) const;
  std::size_t complement_clip(std::uint32_t gram) const;

  const Objective* objective_;
  std::vector<char> in_test_;
  std::size_t test_size_ = 0;
  std::vector<std::uint32_t> speaker_test_;
  std::vector<std::uint32_t> transcript_test_;
  std::vector<std::vector<double>> channel_test_;  // histogram terms
  AlignmentCounts alignment_;
  std::array<std::int64_t, 3> rate_sums_{};
  std::size_t with_hypothesis_ = 0;
  std::size_t uncovered_transcripts_ = 0;
  std::size_t uncovered_speakers_ = 0;
  // Complement n-gram clipping state: per gram, how many complement
  // transcripts contain it exactly c times (index c - 1).
  std::vector<std::vector<std::uint32_t>> gram_presence_;
  std::vector<std::uint32_t> complement_lengths_;  // distinct transcripts by length
};

}  // namespace splitforge

#endif  // SPLITFORGE_OBJECTIVE_HPP_
