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

#ifndef SPLITFORGE_ASCENT_HPP_
#define SPLITFORGE_ASCENT_HPP_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "splitforge/objective.hpp"
#include "splitforge/textmetrics.hpp"

namespace splitforge {

enum class MoveRule { kFirstImprovement, kBestImprovement };

struct AscentOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::size_t max_passes = 100;
  MoveRule rule = MoveRule::kFirstImprovement;
  // Cross-check the incremental state against a full re-evaluation after
  // every accepted move; throws std::logic_error on mismatch.
  bool debug_check = false;
  bool record_trace = false;
};

struct TraceEntry {
  std::size_t restart = 0;
  std::size_t pass = 0;
  std::size_t move = 0;  // accepted-move counter within the restart
  double score = 0.0;
};

struct RestartSummary {
  CandidateSplit initial;
  double initial_score = 0.0;
  CandidateSplit final;
  double final_score = 0.0;
  std::size_t passes = 0;
  std::size_t accepted_moves = 0;
  bool converged = false;  // a full pass accepted nothing
};

struct AscentResult {
  CandidateSplit best;
  double best_score = 0.0;
  std::size_t best_restart = 0;
  std::vector<RestartSummary> restarts;
  std::vector<TraceEntry> trace;  // restart-major order
};

// Seeded random greedy fill: visits the blocks in a shuffled order and
// adds each one that keeps the size within target + tolerance and the
// coverage constraints satisfied, until the size reaches the target.
// Throws InfeasibleError naming the binding constraint when the result
// is not feasible.
CandidateSplit initialize(const Objective& objective, std::uint64_t seed);

// Coordinate ascent with restarts. Restart r is seeded from
// derive_seed(seed, r) and runs passes over the blocks in a reshuffled
// order; a block's move is a swap with a block on the other side or a
// lone add/remove, accepted only when the result is feasible and scores
// strictly higher. The best restart wins, ties going to the lower index.
// Restarts run concurrently; the result does not depend on the thread
// count.
AscentResult run_ascent(const Objective& objective, const AscentOptions& options);

// Single-threaded reference for run_ascent; identical output.
AscentResult run_ascent_serial(const Objective& objective,
                               const AscentOptions& options);

// Line-delimited JSON, one record per trace entry.
std::string format_trace(const std::vector<TraceEntry>& trace);

}  // namespace splitforge

#endif  // SPLITFORGE_ASCENT_HPP_
