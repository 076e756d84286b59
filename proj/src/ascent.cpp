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

#include "splitforge/ascent.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "splitforge/errors.hpp"
#include "splitforge/rng.hpp"

namespace splitforge {

namespace {

std::vector<char> greedy_fill(const Objective& objective, Rng& rng) {
  const auto& blocks = objective.blocks();
  const auto target = objective.config().constraints.target_size;
  const auto tolerance = objective.size_tolerance();

  std::vector<std::size_t> order(blocks.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(std::span(order));

  SearchState state(objective);
  bool coverage_rejected = false;
  for (const auto b : order) {
    if (state.test_size() >= target) break;
    if (state.test_size() + blocks[b].size() > target + tolerance) continue;
    state.add(b);
    if (!state.coverage_ok()) {
      state.remove(b);
      coverage_rejected = true;
    }
  }
  if (!state.feasible()) {
    std::string why = "cannot reach test size " + std::to_string(target) +
                      " +/- " + std::to_string(tolerance) + " (reached " +
                      std::to_string(state.test_size()) + " of a pool of " +
                      std::to_string(objective.pool_size()) + ")";
    if (coverage_rejected) {
      const auto& c = objective.config().constraints;
      why += c.require_full_transcript_coverage
                 ? "; binding constraint: full transcript coverage"
                 : "; binding constraint: full speaker coverage";
    } else {
      why += "; binding constraint: test size";
    }
    throw InfeasibleError("", why);
  }
  return state.membership();
}

struct RestartOutcome {
  RestartSummary summary;
  std::vector<TraceEntry> trace;
};

class Climber {
 public:
  Climber(const Objective& objective, const AscentOptions& options,
          std::size_t restart)
      : objective_(objective),
        options_(options),
        restart_(restart),
        rng_(derive_seed(options.seed, restart)),
        state_(objective) {}

  RestartOutcome run() {
    const auto initial = greedy_fill(objective_, rng_);
    for (std::size_t b = 0; b < initial.size(); ++b) {
      if (initial[b]) state_.add(b);
    }
    score_ = state_.score();
    RestartOutcome out;
    out.summary.initial = objective_.candidate_from(initial);
    out.summary.initial_score = score_;

    const auto n = objective_.blocks().size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    while (out.summary.passes < options_.max_passes) {
      ++out.summary.passes;
      rng_.shuffle(std::span(order));
      std::size_t accepted = 0;
      for (const auto b : order) {
        if (improve(b)) {
          ++accepted;
          ++out.summary.accepted_moves;
          if (options_.debug_check) cross_check();
          if (options_.record_trace) {
            out.trace.push_back({restart_, out.summary.passes,
                                 out.summary.accepted_moves, score_});
          }
        }
      }
      if (accepted == 0) {
        out.summary.converged = true;
        break;
      }
    }
    out.summary.final = objective_.candidate_from(state_.membership());
    out.summary.final_score = score_;
    return out;
  }

 private:
  // Tries the moves of coordinate b; applies the chosen one if any.
  bool improve(std::size_t b) {
    const bool inside = state_.in_test(b);
    std::vector<std::size_t> partners;
    for (std::size_t o = 0; o < objective_.blocks().size(); ++o) {
      if (o != b && state_.in_test(o) != inside) partners.push_back(o);
    }
    rng_.shuffle(std::span(partners));

    std::optional<std::size_t> best_partner;
    bool best_is_toggle = false;
    double best_score = score_;

    auto consider = [&](std::optional<std::size_t> partner) {
      apply(b, partner, inside);
      const double s = state_.feasible() ? state_.score() : 0.0;
      const bool better = state_.feasible() && s > best_score;
      undo(b, partner, inside);
      if (better) {
        best_score = s;
        best_partner = partner;
        best_is_toggle = !partner.has_value();
      }
      return better;
    };

    const bool first = options_.rule == MoveRule::kFirstImprovement;
    bool found = false;
    for (const auto o : partners) {
      if (consider(o)) {
        found = true;
        if (first) break;
      }
    }
    if (!(found && first)) {
      if (consider(std::nullopt)) found = true;
    }
    if (!found) return false;
    apply(b, best_is_toggle ? std::nullopt : best_partner, inside);
    score_ = best_score;
    return true;
  }

  void apply(std::size_t b, std::optional<std::size_t> partner, bool inside) {
    if (inside) {
      state_.remove(b);
      if (partner) state_.add(*partner);
    } else {
      state_.add(b);
      if (partner) state_.remove(*partner);
    }
  }

  void undo(std::size_t b, std::optional<std::size_t> partner, bool inside) {
    if (inside) {
      if (partner) state_.remove(*partner);
      state_.add(b);
    } else {
      if (partner) state_.add(*partner);
      state_.remove(b);
    }
  }

  void cross_check() const {
    const auto candidate = objective_.candidate_from(state_.membership());
    const double full = objective_.evaluate(candidate);
    if (full != score_) {
      throw std::logic_error("ascent: incremental score diverged from evaluate");
    }
    if (!objective_.check_constraints(candidate).empty()) {
      throw std::logic_error("ascent: accepted an infeasible candidate");
    }
  }

  const Objective& objective_;
  const AscentOptions& options_;
  std::size_t restart_;
  Rng rng_;
  SearchState state_;
  double score_ = 0.0;
};

AscentResult collect(std::vector<RestartOutcome> outcomes) {
  AscentResult result;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    auto& o = outcomes[r];
    if (r == 0 || o.summary.final_score > result.best_score) {
      result.best = o.summary.final;
      result.best_score = o.summary.final_score;
      result.best_restart = r;
    }
    result.trace.insert(result.trace.end(), o.trace.begin(), o.trace.end());
    result.restarts.push_back(std::move(o.summary));
  }
  return result;
}

void check_options(const AscentOptions& options) {
  if (options.restarts == 0) throw ValidationError("ascent: restarts must be positive");
}

}  // namespace

CandidateSplit initialize(const Objective& objective, std::uint64_t seed) {
  Rng rng(seed);
  return objective.candidate_from(greedy_fill(objective, rng));
}

AscentResult run_ascent_serial(const Objective& objective,
                               const AscentOptions& options) {
  check_options(options);
  std::vector<RestartOutcome> outcomes;
  for (std::size_t r = 0; r < options.restarts; ++r) {
    outcomes.push_back(Climber(objective, options, r).run());
  }
  return collect(std::move(outcomes));
}

AscentResult run_ascent(const Objective& objective, const AscentOptions& options) {
  check_options(options);
  const auto n = static_cast<std::int64_t>(options.restarts);
  std::vector<RestartOutcome> outcomes(options.restarts);
  std::vector<std::exception_ptr> errors(options.restarts);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t r = 0; r < n; ++r) {
    const auto i = static_cast<std::size_t>(r);
    try {
      outcomes[i] = Climber(objective, options, i).run();
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return collect(std::move(outcomes));
}

std::string format_trace(const std::vector<TraceEntry>& trace) {
  std::string out;
  char line[160];
  for (const auto& e : trace) {
    std::snprintf(line, sizeof line,
                  "{\"restart\":%zu,\"pass\":%zu,\"move\":%zu,\"score\":%.17g}\n",
                  e.restart, e.pass, e.move, e.score);
    out += line;
  }
  return out;
}

}  // namespace splitforge
