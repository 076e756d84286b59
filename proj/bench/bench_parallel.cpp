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

// Parallel kernels against their serial references.

#include <benchmark/benchmark.h>

#include <numeric>

#include "splitforge/ascent.hpp"
#include "splitforge/objective.hpp"
#include "splitforge/pipeline.hpp"
#include "splitforge/synth.hpp"
#include "splitforge/textmetrics.hpp"

namespace splitforge {
namespace {

const Dataset& dataset() {
  static const Dataset d = generate_dataset(default_synth_spec());
  return d;
}

const Objective& speaker_objective() {
  static const Objective objective = [] {
    const auto& d = dataset();
    std::vector<std::size_t> pool(d.size());
    std::iota(pool.begin(), pool.end(), 0);
    auto config = *make_preset("challenge").speaker_stage;
    config.constraints.target_size = d.size() / 10;
    return Objective(d, build_blocks(d, BlockKind::kSpeaker, pool), {}, config);
  }();
  return objective;
}

template <AscentResult (*Run)(const Objective&, const AscentOptions&)>
void BM_Ascent(benchmark::State& state) {
  AscentOptions options;
  options.restarts = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Run(speaker_objective(), options).best_score);
}
BENCHMARK(BM_Ascent<run_ascent_serial>)->Name("ascent/serial")->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ascent<run_ascent>)->Name("ascent/parallel")->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

struct OverlapInput {
  std::vector<Tokens> test;
  std::vector<Tokens> train;
};

const OverlapInput& overlap_input() {
  static const OverlapInput input = [] {
    OverlapInput in;
    const auto& d = dataset();
    for (std::size_t t = 0; t < d.transcript_count(); ++t) {
      (t % 5 == 0 ? in.test : in.train).push_back(d.transcript_tokens(t));
    }
    // Hypotheses stand in for a larger, noisier test side.
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (const auto& h = d.record(i).asr_hypothesis) in.test.push_back(normalize_transcript(*h));
    }
    return in;
  }();
  return input;
}

template <Parallelism P>
void BM_Overlap(benchmark::State& state) {
  const auto& in = overlap_input();
  for (auto _ : state) {
    benchmark::DoNotOptimize(corpus_ngram_overlap(in.test, in.train, 2, P));
  }
}
BENCHMARK(BM_Overlap<Parallelism::kSerial>)->Name("ngram_overlap/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Overlap<Parallelism::kParallel>)->Name("ngram_overlap/parallel")->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace splitforge

BENCHMARK_MAIN();
