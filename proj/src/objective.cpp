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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "splitforge/errors.hpp"

namespace splitforge {

std::string_view to_string(BlockKind kind) {
  return kind == BlockKind::kSpeaker ? "speaker" : "transcript";
}

BlockKind block_kind_from_string(std::string_view name) {
  if (name == "speaker") return BlockKind::kSpeaker;
  if (name == "transcript") return BlockKind::kTranscript;
  throw ValidationError("unknown block kind '" + std::string(name) + "'");
}

namespace {

constexpr std::pair<TermKind, std::string_view> kTermNames[] = {
    {TermKind::kDemographicKl, "demographic_kl"},
    {TermKind::kIntentKl, "intent_kl"},
    {TermKind::kLengthKl, "length_kl"},
    {TermKind::kWerChallenge, "wer_challenge"},
    {TermKind::kBleuChallenge, "bleu_challenge"},
    {TermKind::kNgramOverlap, "ngram_overlap"},
};

bool is_kl(TermKind kind) {
  return kind == TermKind::kDemographicKl || kind == TermKind::kIntentKl ||
         kind == TermKind::kLengthKl;
}

bool uses_ngrams(TermKind kind) {
  return kind == TermKind::kBleuChallenge || kind == TermKind::kNgramOverlap;
}

double param_or(const UtilityTerm& term, const std::string& name, double fallback) {
  const auto it = term.parameters.find(name);
  return it == term.parameters.end() ? fallback : it->second;
}

BleuWeights order_weights(const UtilityTerm& term) {
  return {param_or(term, "w1", 0.5), param_or(term, "w2", 0.5),
          param_or(term, "w3", 0.0), param_or(term, "w4", 0.0)};
}

UWerParams wer_params(const UtilityTerm& term) {
  return {param_or(term, "alpha", 0.05), param_or(term, "beta", 0.05),
          param_or(term, "gamma", 0.4)};
}

constexpr double kFixedScale = 0x1.0p40;

std::int64_t to_fixed(double rate) {
  return static_cast<std::int64_t>(std::llround(rate * kFixedScale));
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> tally(
    const std::vector<std::size_t>& ids) {
  std::map<std::size_t, std::uint32_t> counts;
  for (const auto id : ids) ++counts[id];
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (const auto& [id, n] : counts) {
    out.emplace_back(static_cast<std::uint32_t>(id), n);
  }
  return out;
}

}  // namespace

std::string_view to_string(TermKind kind) {
  for (const auto& [k, name] : kTermNames) {
    if (k == kind) return name;
  }
  return "?";
}

TermKind term_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kTermNames) {
    if (n == name) return k;
  }
  throw ValidationError("unknown utility term '" + std::string(name) + "'");
}

std::string_view to_string(Direction direction) {
  return direction == Direction::kMaximize ? "maximize" : "minimize";
}

Direction direction_from_string(std::string_view name) {
  if (name == "maximize") return Direction::kMaximize;
  if (name == "minimize") return Direction::kMinimize;
  throw ValidationError("unknown direction '" + std::string(name) + "'");
}

std::vector<Block> build_blocks(const Dataset& dataset, BlockKind kind,
                                std::span<const std::size_t> pool) {
  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (const auto i : pool) {
    const auto key = kind == BlockKind::kSpeaker ? dataset.speaker_of(i)
                                                 : dataset.transcript_of(i);
    groups[key].push_back(i);
  }

  std::vector<Block> blocks;
  blocks.reserve(groups.size());
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    Block b;
    b.kind = kind;
    b.id = kind == BlockKind::kSpeaker ? dataset.speaker_id(key)
                                       : dataset.transcript(key);
    std::vector<std::size_t> speakers, transcripts, intents, lengths;
    for (const auto i : members) {
      speakers.push_back(dataset.speaker_of(i));
      transcripts.push_back(dataset.transcript_of(i));
      intents.push_back(dataset.intent_of(i));
      lengths.push_back(dataset.tokens(i).size());
      const auto& hyp = dataset.record(i).asr_hypothesis;
      if (!hyp) continue;
      const auto counts = wer_align(dataset.tokens(i), normalize_transcript(*hyp));
      const auto rates = wer_rates(counts);
      b.alignment += counts;
      b.rate_sums[0] += to_fixed(rates.substitution);
      b.rate_sums[1] += to_fixed(rates.insertion);
      b.rate_sums[2] += to_fixed(rates.deletion);
      ++b.with_hypothesis;
    }
    b.speakers = tally(speakers);
    b.transcripts = tally(transcripts);
    b.intents = tally(intents);
    b.lengths = tally(lengths);
    b.members = std::move(members);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

void validate(const ObjectiveConfig& config, const Dataset& dataset) {
  if (config.terms.empty()) throw ValidationError("objective has no terms");
  if (!(config.smoothing > 0.0) || !std::isfinite(config.smoothing)) {
    throw ValidationError("objective smoothing must be positive");
  }
  const auto kind = config.constraints.block_kind;
  if (kind == BlockKind::kTranscript &&
      config.constraints.require_full_transcript_coverage) {
    throw ValidationError(
        "transcript blocks cannot require full transcript coverage");
  }
  const bool any_hypothesis =
      std::any_of(dataset.records().begin(), dataset.records().end(),
                  [](const auto& r) { return r.asr_hypothesis.has_value(); });

  for (const auto& term : config.terms) {
    const std::string name(to_string(term.kind));
    if (!(term.weight >= 0.0) || !std::isfinite(term.weight)) {
      throw ValidationError(name + ": weight must be finite and non-negative");
    }
    std::set<std::string> allowed;
    switch (term.kind) {
      case TermKind::kDemographicKl:
        if (kind != BlockKind::kSpeaker) {
          throw ValidationError(name + " requires speaker blocks");
        }
        break;
      case TermKind::kIntentKl:
      case TermKind::kLengthKl:
        break;
      case TermKind::kWerChallenge:
        if (!any_hypothesis) {
          throw ValidationError(name + " requires ASR hypotheses in the manifest");
        }
        allowed = {"alpha", "beta", "gamma", "macro"};
        break;
      case TermKind::kBleuChallenge:
      case TermKind::kNgramOverlap:
        allowed = {"w1", "w2", "w3", "w4"};
        break;
    }
    for (const auto& [key, value] : term.parameters) {
      if (!allowed.contains(key)) {
        throw ValidationError(name + ": unknown parameter '" + key + "'");
      }
      if (!std::isfinite(value) || value < 0.0) {
        throw ValidationError(name + ": parameter '" + key +
                              "' must be finite and non-negative");
      }
    }
    if (term.kind == TermKind::kWerChallenge) {
      const double macro = param_or(term, "macro", 0.0);
      if (macro != 0.0 && macro != 1.0) {
        throw ValidationError(name + ": 'macro' must be 0 or 1");
      }
    }
    if (uses_ngrams(term.kind)) {
      const auto w = order_weights(term);
      const double sum = w[0] + w[1] + w[2] + w[3];
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ValidationError(name + ": order weights must sum to 1");
      }
    }
  }
}

// Dense lookup tables shared by every SearchState of one Objective.
struct Objective::Tables {
  struct Contribution {
    std::uint32_t channel;
    std::uint32_t category;
    double count;
  };
  struct TermPlan {
    std::size_t channel_begin = 0;
    std::size_t channel_end = 0;
    UWerParams wer;
    bool macro = false;
    BleuWeights orders{};
  };

  std::vector<std::uint32_t> pool_speaker;
  std::vector<std::uint32_t> pool_transcript;
  std::vector<std::vector<double>> channel_pool;
  std::vector<std::vector<Contribution>> block_channels;
  std::vector<TermPlan> plans;

  bool ngrams = false;
  // transcript -> order -> (gram id, count)
  std::vector<std::array<std::vector<std::pair<std::uint32_t, std::uint32_t>>,
                         kMaxNgramOrder>>
      transcript_grams;
  std::vector<std::uint32_t> transcript_length_id;
  std::vector<std::size_t> length_values;  // sorted distinct transcript lengths
  std::size_t gram_count = 0;
  std::vector<std::uint32_t> gram_max_count;

  std::map<std::string, std::size_t, std::less<>> block_by_id;
};

Objective::Objective(const Dataset& dataset, std::vector<Block> blocks,
                     std::vector<std::size_t> background,
                     ObjectiveConfig config)
    : dataset_(&dataset),
      blocks_(std::move(blocks)),
      background_(std::move(background)),
      config_(std::move(config)),
      scales_(config_.terms.size()),
      tables_(std::make_unique<Tables>()) {
  validate(config_, dataset);
  for (const auto& b : blocks_) {
    if (b.kind != config_.constraints.block_kind) {
      throw ValidationError("block '" + b.id + "' has the wrong kind for this stage");
    }
  }
  auto& t = *tables_;

  std::vector<std::size_t> pool = background_;
  std::size_t largest = 0;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    pool.insert(pool.end(), blocks_[b].members.begin(), blocks_[b].members.end());
    largest = std::max(largest, blocks_[b].size());
    if (!t.block_by_id.emplace(blocks_[b].id, b).second) {
      throw ValidationError("duplicate block id '" + blocks_[b].id + "'");
    }
  }
  pool_size_ = pool.size();
  tolerance_ = config_.constraints.size_tolerance.value_or(largest);
  if (config_.constraints.target_size >= pool_size_) {
    throw ValidationError("target test size " +
                          std::to_string(config_.constraints.target_size) +
                          " is not below the pool size " +
                          std::to_string(pool_size_));
  }

  t.pool_speaker.assign(dataset.speaker_count(), 0);
  t.pool_transcript.assign(dataset.transcript_count(), 0);
  for (const auto i : pool) {
    ++t.pool_speaker[dataset.speaker_of(i)];
    ++t.pool_transcript[dataset.transcript_of(i)];
  }

  // Histogram channels for the KL terms.
  std::map<std::size_t, std::uint32_t> length_ids;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    length_ids.emplace(dataset.tokens(i).size(), 0);
  }
  {
    std::uint32_t next = 0;
    for (auto& [len, id] : length_ids) id = next++;
  }
  t.block_channels.resize(blocks_.size());
  for (const auto& term : config_.terms) {
    Tables::TermPlan plan;
    plan.channel_begin = t.channel_pool.size();
    if (term.kind == TermKind::kDemographicKl) {
      const auto mode = config_.demographic_mode;
      // Category ids per channel over every speaker in the dataset.
      std::vector<std::map<std::string, std::uint32_t>> categories;
      std::vector<std::vector<std::uint32_t>> speaker_category(dataset.speaker_count());
      for (std::size_t s = 0; s < dataset.speaker_count(); ++s) {
        const auto keys = demographic_keys(dataset, s, mode);
        if (categories.size() < keys.size()) categories.resize(keys.size());
        for (std::size_t c = 0; c < keys.size(); ++c) {
          categories[c].emplace(keys[c], 0);
        }
      }
      if (categories.empty()) categories.resize(1, {{"", 0}});
      for (auto& channel : categories) {
        std::uint32_t next = 0;
        for (auto& [key, id] : channel) id = next++;
      }
      for (std::size_t s = 0; s < dataset.speaker_count(); ++s) {
        const auto keys = demographic_keys(dataset, s, mode);
        for (std::size_t c = 0; c < keys.size(); ++c) {
          speaker_category[s].push_back(categories[c].at(keys[c]));
        }
        if (keys.empty()) speaker_category[s].push_back(0);
      }
      const auto base = static_cast<std::uint32_t>(t.channel_pool.size());
      for (const auto& channel : categories) {
        t.channel_pool.emplace_back(channel.size(), 0.0);
      }
      for (std::size_t s = 0; s < dataset.speaker_count(); ++s) {
        if (t.pool_speaker[s] == 0) continue;
        for (std::size_t c = 0; c < speaker_category[s].size(); ++c) {
          t.channel_pool[base + c][speaker_category[s][c]] += 1.0;
        }
      }
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        for (const auto& [s, n] : blocks_[b].speakers) {
          for (std::size_t c = 0; c < speaker_category[s].size(); ++c) {
            t.block_channels[b].push_back(
                {base + static_cast<std::uint32_t>(c), speaker_category[s][c], 1.0});
          }
        }
      }
    } else if (term.kind == TermKind::kIntentKl || term.kind == TermKind::kLengthKl) {
      const bool intent = term.kind == TermKind::kIntentKl;
      const auto channel = static_cast<std::uint32_t>(t.channel_pool.size());
      auto& hist = t.channel_pool.emplace_back(
          intent ? dataset.intent_count() : length_ids.size(), 0.0);
      for (const auto i : pool) {
        hist[intent ? dataset.intent_of(i) : length_ids.at(dataset.tokens(i).size())] += 1.0;
      }
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& features = intent ? blocks_[b].intents : blocks_[b].lengths;
        for (const auto& [key, n] : features) {
          const auto category = intent ? key : length_ids.at(key);
          t.block_channels[b].push_back({channel, category, static_cast<double>(n)});
        }
      }
    } else if (term.kind == TermKind::kWerChallenge) {
      plan.wer = wer_params(term);
      plan.macro = param_or(term, "macro", 0.0) == 1.0;
    } else {
      plan.orders = order_weights(term);
      t.ngrams = true;
    }
    plan.channel_end = t.channel_pool.size();
    t.plans.push_back(plan);
  }

  if (t.ngrams) {
    std::map<NGram, std::uint32_t> gram_ids;
    std::set<std::size_t> lengths;
    t.transcript_grams.resize(dataset.transcript_count());
    for (std::size_t tr = 0; tr < dataset.transcript_count(); ++tr) {
      const auto& tokens = dataset.transcript_tokens(tr);
      lengths.insert(tokens.size());
      const auto profile = ngram_profile(tokens);
      for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
        for (const auto& [gram, count] : profile.counts[k]) {
          const auto [it, inserted] =
              gram_ids.emplace(gram, static_cast<std::uint32_t>(gram_ids.size()));
          t.transcript_grams[tr][k].emplace_back(it->second,
                                                 static_cast<std::uint32_t>(count));
        }
      }
    }
    t.gram_count = gram_ids.size();
    t.gram_max_count.assign(t.gram_count, 0);
    for (const auto& per_order : t.transcript_grams) {
      for (const auto& grams : per_order) {
        for (const auto& [g, c] : grams) {
          t.gram_max_count[g] = std::max(t.gram_max_count[g], c);
        }
      }
    }
    t.length_values.assign(lengths.begin(), lengths.end());
    t.transcript_length_id.resize(dataset.transcript_count());
    for (std::size_t tr = 0; tr < dataset.transcript_count(); ++tr) {
      t.transcript_length_id[tr] = static_cast<std::uint32_t>(
          std::lower_bound(t.length_values.begin(), t.length_values.end(),
                           dataset.transcript_tokens(tr).size()) -
          t.length_values.begin());
    }
  }
}

Objective::~Objective() = default;
Objective::Objective(Objective&&) noexcept = default;

std::optional<std::size_t> Objective::block_index(std::string_view id) const {
  const auto it = tables_->block_by_id.find(id);
  if (it == tables_->block_by_id.end()) return std::nullopt;
  return it->second;
}

std::vector<char> Objective::membership(const CandidateSplit& candidate) const {
  std::vector<char> in_test(blocks_.size(), 0);
  for (const auto& id : candidate.test) {
    const auto b = block_index(id);
    if (!b) throw ValidationError("candidate names unknown block '" + id + "'");
    in_test[*b] = 1;
  }
  return in_test;
}

CandidateSplit Objective::candidate_from(const std::vector<char>& in_test) const {
  CandidateSplit candidate;
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    (in_test[b] ? candidate.test : candidate.complement).insert(blocks_[b].id);
  }
  return candidate;
}

namespace {

SearchState state_for(const Objective& objective, const std::vector<char>& in_test) {
  SearchState state(objective);
  for (std::size_t b = 0; b < in_test.size(); ++b) {
    if (in_test[b]) state.add(b);
  }
  return state;
}

}  // namespace

double Objective::evaluate(const CandidateSplit& candidate) const {
  return state_for(*this, membership(candidate)).score();
}

std::vector<double> Objective::term_values(const CandidateSplit& candidate) const {
  return state_for(*this, membership(candidate)).term_values();
}

std::vector<std::string> Objective::check_constraints(
    const CandidateSplit& candidate) const {
  std::vector<std::string> violations;
  std::vector<char> in_test(blocks_.size(), 0);
  std::vector<char> seen(blocks_.size(), 0);
  for (const auto& id : candidate.test) {
    const auto b = block_index(id);
    if (!b) {
      violations.push_back("unknown test block '" + id + "'");
      continue;
    }
    in_test[*b] = 1;
    seen[*b] = 1;
  }
  for (const auto& id : candidate.complement) {
    const auto b = block_index(id);
    if (!b) {
      violations.push_back("unknown complement block '" + id + "'");
      continue;
    }
    if (in_test[*b]) violations.push_back("block '" + id + "' is on both sides");
    seen[*b] = 1;
  }
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (!seen[b]) violations.push_back("block '" + blocks_[b].id + "' is unassigned");
  }

  const auto state = state_for(*this, in_test);
  if (!state.size_ok()) {
    violations.push_back("test size " + std::to_string(state.test_size()) +
                         " outside " + std::to_string(config_.constraints.target_size) +
                         " +/- " + std::to_string(tolerance_));
  }
  const auto& t = *tables_;
  std::vector<std::uint32_t> speaker_test(t.pool_speaker.size(), 0);
  std::vector<std::uint32_t> transcript_test(t.pool_transcript.size(), 0);
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (!in_test[b]) continue;
    for (const auto& [s, n] : blocks_[b].speakers) speaker_test[s] += n;
    for (const auto& [tr, n] : blocks_[b].transcripts) transcript_test[tr] += n;
  }
  if (config_.constraints.require_full_transcript_coverage) {
    for (std::size_t tr = 0; tr < transcript_test.size(); ++tr) {
      if (transcript_test[tr] > 0 && transcript_test[tr] == t.pool_transcript[tr]) {
        violations.push_back("transcript '" + dataset_->transcript(tr) +
                             "' occurs only in the test set");
      }
    }
  }
  if (config_.constraints.require_full_speaker_coverage) {
    for (std::size_t s = 0; s < speaker_test.size(); ++s) {
      if (speaker_test[s] > 0 && speaker_test[s] == t.pool_speaker[s]) {
        violations.push_back("speaker '" + dataset_->speaker_id(s) +
                             "' occurs only in the test set");
      }
    }
  }
  return violations;
}

void Objective::calibrate(std::span<const CandidateSplit> samples) {
  if (!config_.normalize || samples.empty()) return;
  const auto n = config_.terms.size();
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  for (const auto& sample : samples) {
    const auto values = term_values(sample);
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], values[i]);
      hi[i] = std::max(hi[i], values[i]);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double range = hi[i] - lo[i];
    scales_[i] = {lo[i], range > 1e-12 ? range : 1.0};
  }
}

double Objective::combine(std::span<const double> term_values) const {
  double score = 0.0;
  for (std::size_t i = 0; i < config_.terms.size(); ++i) {
    const auto& term = config_.terms[i];
    double v = term_values[i];
    if (config_.normalize) v = (v - scales_[i].offset) / scales_[i].scale;
    score += term.weight * (term.direction == Direction::kMaximize ? v : -v);
  }
  return score;
}

SearchState::SearchState(const Objective& objective)
    : objective_(&objective),
      in_test_(objective.blocks().size(), 0),
      speaker_test_(objective.tables_->pool_speaker.size(), 0),
      transcript_test_(objective.tables_->pool_transcript.size(), 0) {
  const auto& t = *objective.tables_;
  for (const auto& pool : t.channel_pool) channel_test_.emplace_back(pool.size(), 0.0);
  if (t.ngrams) {
    gram_presence_.resize(t.gram_count);
    for (std::size_t g = 0; g < t.gram_count; ++g) {
      gram_presence_[g].assign(t.gram_max_count[g], 0);
    }
    complement_lengths_.assign(t.length_values.size(), 0);
    for (std::size_t tr = 0; tr < t.pool_transcript.size(); ++tr) {
      if (t.pool_transcript[tr] > 0) set_transcript_presence(tr, +1);
    }
  }
}

void SearchState::add(std::size_t block) {
  if (in_test_[block]) throw std::logic_error("block already in test");
  in_test_[block] = 1;
  move(block, +1);
}

void SearchState::remove(std::size_t block) {
  if (!in_test_[block]) throw std::logic_error("block not in test");
  in_test_[block] = 0;
  move(block, -1);
}

void SearchState::move(std::size_t block, int sign) {
  const auto& objective = *objective_;
  const auto& t = *objective.tables_;
  const auto& b = objective.blocks_[block];
  const auto& constraints = objective.config_.constraints;

  if (sign > 0) {
    test_size_ += b.size();
    alignment_ += b.alignment;
    with_hypothesis_ += b.with_hypothesis;
  } else {
    test_size_ -= b.size();
    alignment_ -= b.alignment;
    with_hypothesis_ -= b.with_hypothesis;
  }
  for (std::size_t k = 0; k < 3; ++k) rate_sums_[k] += sign * b.rate_sums[k];

  for (const auto& [s, n] : b.speakers) {
    const auto before = speaker_test_[s];
    const auto after = sign > 0 ? before + n : before - n;
    speaker_test_[s] = after;
    if (constraints.require_full_speaker_coverage) {
      const bool was = before > 0 && before == t.pool_speaker[s];
      const bool now = after > 0 && after == t.pool_speaker[s];
      if (was != now) now ? ++uncovered_speakers_ : --uncovered_speakers_;
    }
  }
  for (const auto& [tr, n] : b.transcripts) {
    const auto before = transcript_test_[tr];
    const auto after = sign > 0 ? before + n : before - n;
    transcript_test_[tr] = after;
    const bool was_present = t.pool_transcript[tr] > before;
    const bool now_present = t.pool_transcript[tr] > after;
    if (constraints.require_full_transcript_coverage) {
      const bool was = before > 0 && !was_present;
      const bool now = after > 0 && !now_present;
      if (was != now) now ? ++uncovered_transcripts_ : --uncovered_transcripts_;
    }
    if (t.ngrams && was_present != now_present) {
      set_transcript_presence(tr, now_present ? +1 : -1);
    }
  }
  for (const auto& c : t.block_channels[block]) {
    channel_test_[c.channel][c.category] += sign * c.count;
  }
}

void SearchState::set_transcript_presence(std::size_t transcript, int sign) {
  const auto& t = *objective_->tables_;
  for (const auto& grams : t.transcript_grams[transcript]) {
    for (const auto& [g, c] : grams) gram_presence_[g][c - 1] += sign;
  }
  complement_lengths_[t.transcript_length_id[transcript]] += sign;
}

bool SearchState::size_ok() const {
  const auto target = objective_->config_.constraints.target_size;
  const auto tol = objective_->tolerance_;
  // A positive target never accepts an empty test set, whatever the tolerance.
  if (target > 0 && test_size_ == 0) return false;
  return test_size_ + tol >= target && test_size_ <= target + tol;
}

std::size_t SearchState::complement_clip(std::uint32_t gram) const {
  const auto& presence = gram_presence_[gram];
  for (std::size_t c = presence.size(); c > 0; --c) {
    if (presence[c - 1] > 0) return c;
  }
  return 0;
}

double SearchState::kl_value(std::size_t begin, std::size_t end) const {
  const auto& t = *objective_->tables_;
  const double eps = objective_->config_.smoothing;
  double sum = 0.0;
  for (std::size_t ch = begin; ch < end; ++ch) {
    const auto& test = channel_test_[ch];
    const auto& pool = t.channel_pool[ch];
    const auto k = static_cast<double>(test.size());
    double test_total = 0.0;
    double pool_total = 0.0;
    for (std::size_t i = 0; i < test.size(); ++i) {
      test_total += test[i];
      pool_total += pool[i];
    }
    const double p_den = test_total + eps * k;
    const double q_den = (pool_total - test_total) + eps * k;
    for (std::size_t i = 0; i < test.size(); ++i) {
      const double p = (test[i] + eps) / p_den;
      const double q = ((pool[i] - test[i]) + eps) / q_den;
      sum += (p - q) * std::log(p / q);
    }
  }
  return sum;
}

double SearchState::wer_value(std::size_t term_index) const {
  if (with_hypothesis_ == 0 || alignment_.reference_length == 0) return 0.0;
  const auto& plan = objective_->tables_->plans[term_index];
  if (plan.macro) {
    const double n = static_cast<double>(with_hypothesis_) * kFixedScale;
    return u_wer(static_cast<double>(rate_sums_[0]) / n,
                 static_cast<double>(rate_sums_[1]) / n,
                 static_cast<double>(rate_sums_[2]) / n, plan.wer);
  }
  return u_wer(wer_rates(alignment_), plan.wer);
}

double SearchState::bleu_value(const BleuWeights& weights) const {
  const auto& t = *objective_->tables_;
  std::size_t references = 0;
  for (const auto n : complement_lengths_) references += n;
  if (references == 0) return 0.0;

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t tr = 0; tr < transcript_test_.size(); ++tr) {
    if (transcript_test_[tr] == 0) continue;
    ++count;
    double log_sum = 0.0;
    bool zero = false;
    for (std::size_t k = 0; k < kMaxNgramOrder && !zero; ++k) {
      if (weights[k] == 0.0) continue;
      std::size_t matched = 0;
      std::size_t total = 0;
      for (const auto& [g, c] : t.transcript_grams[tr][k]) {
        total += c;
        matched += std::min<std::size_t>(c, complement_clip(g));
      }
      if (matched == 0) {
        zero = true;
      } else {
        log_sum += weights[k] * std::log(static_cast<double>(matched) /
                                         static_cast<double>(total));
      }
    }
    if (zero) continue;
    // Closest complement length, ties to the shorter one.
    const auto c = t.length_values[t.transcript_length_id[tr]];
    std::size_t best = 0;
    bool found = false;
    for (std::size_t l = 0; l < complement_lengths_.size(); ++l) {
      if (complement_lengths_[l] == 0) continue;
      const auto r = t.length_values[l];
      const auto best_d = best > c ? best - c : c - best;
      const auto d = r > c ? r - c : c - r;
      if (!found || d < best_d) {
        best = r;
        found = true;
      }
    }
    const double bp = best > c ? std::exp(1.0 - static_cast<double>(best) /
                                                    static_cast<double>(c))
                               : 1.0;
    sum += bp * std::exp(log_sum);
  }
  return count == 0 ? 0.0 : -sum / static_cast<double>(count);
}

double SearchState::overlap_value(const BleuWeights& weights) const {
  const auto& t = *objective_->tables_;
  double value = 0.0;
  for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
    if (weights[k] == 0.0) continue;
    double weighted = 0.0;
    double mass = 0.0;
    for (std::size_t tr = 0; tr < transcript_test_.size(); ++tr) {
      const auto n = transcript_test_[tr];
      if (n == 0 || t.transcript_grams[tr][k].empty()) continue;
      std::size_t matched = 0;
      std::size_t total = 0;
      for (const auto& [g, c] : t.transcript_grams[tr][k]) {
        total += c;
        matched += std::min<std::size_t>(c, complement_clip(g));
      }
      weighted += n * (static_cast<double>(matched) / static_cast<double>(total));
      mass += n;
    }
    if (mass > 0.0) value += weights[k] * weighted / mass;
  }
  return value;
}

std::vector<double> SearchState::term_values() const {
  const auto& objective = *objective_;
  const auto& t = *objective.tables_;
  std::vector<double> values;
  values.reserve(objective.config_.terms.size());
  for (std::size_t i = 0; i < objective.config_.terms.size(); ++i) {
    const auto& term = objective.config_.terms[i];
    const auto& plan = t.plans[i];
    if (is_kl(term.kind)) {
      values.push_back(kl_value(plan.channel_begin, plan.channel_end));
    } else if (term.kind == TermKind::kWerChallenge) {
      values.push_back(wer_value(i));
    } else if (term.kind == TermKind::kBleuChallenge) {
      values.push_back(bleu_value(plan.orders));
    } else {
      values.push_back(overlap_value(plan.orders));
    }
  }
  return values;
}

}  // namespace splitforge
