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

#ifndef SPLITFORGE_CLI_HPP_
#define SPLITFORGE_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "splitforge/pipeline.hpp"
#include "splitforge/synth.hpp"

namespace splitforge {

// Everything a split run depends on. The preset is stored fully inlined
// so an emitted config reproduces the run without the preset table.
struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path speakers;
  SplitPreset preset = make_preset("unseen");
  std::uint64_t seed = 0;
  std::size_t restarts = 5;
  std::size_t max_passes = 100;
  MoveRule rule = MoveRule::kFirstImprovement;
  bool debug_check = false;
  std::filesystem::path out = "splitforge-out";
  int threads = 0;  // 0: available parallelism
  bool verbose = false;
};

// Config document schema (JSON):
//   dataset: {manifest, speakers}
//   preset: name; stages: {speaker, utterance} objective configs or null
//   ratios: "a:b:c:d"; allow_shared_test_transcripts
//   seed, restarts, max_passes, move_rule, debug_check
//   out, threads, verbose
// Fields absent from the document keep the values of `base`; a "stages"
// member replaces the preset's stage configs.
RunConfig config_from_json(const nlohmann::json& doc, RunConfig base = {});
nlohmann::ordered_json config_to_json(const RunConfig& config);

nlohmann::ordered_json objective_config_to_json(const ObjectiveConfig& config);
ObjectiveConfig objective_config_from_json(const nlohmann::json& doc);

// Hex FNV-1a 64 over the canonical config (paths, output and verbosity
// excluded) and the canonical dataset documents.
std::string config_digest(const RunConfig& config, const Dataset& dataset);

// Reads a dataset; a missing file is a ValidationError naming the path.
Dataset load_dataset(const std::filesystem::path& manifest,
                     const std::filesystem::path& speakers,
                     std::vector<std::string>* warnings = nullptr);

// Reads train/valid/test_speaker/test_utterance.csv from a splits directory.
SplitAssignment load_split_dir(const std::filesystem::path& dir);

// Each command returns the process exit status: 0 success,
// 2 config/validation, 3 infeasible, 4 I/O.
int cmd_split(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_audit(const std::filesystem::path& manifest,
              const std::filesystem::path& speakers,
              const std::filesystem::path& splits,
              const std::optional<std::filesystem::path>& out_dir, bool json,
              std::ostream& out, std::ostream& err);
int cmd_compare(const std::filesystem::path& manifest,
                const std::filesystem::path& speakers,
                const std::vector<std::filesystem::path>& splits,
                std::vector<std::string> names, std::ostream& out,
                std::ostream& err);
int cmd_synth(const SynthSpec& spec, const std::filesystem::path& out_dir,
              std::ostream& out, std::ostream& err);

// Full command line including argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace splitforge

#endif  // SPLITFORGE_CLI_HPP_
