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

#ifndef SPLITFORGE_SYNTH_HPP_
#define SPLITFORGE_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "splitforge/manifest.hpp"

namespace splitforge {

struct SynthAttribute {
  std::string name;
  // (category, weight); weights are normalized.
  std::vector<std::pair<std::string, double>> categories;
};

struct SynthIntent {
  std::vector<std::string> slots;
  std::vector<std::string> paraphrases;
};

// Token corruption rates applied to the hypotheses of one speaker group.
// Speakers join a group either by matching `attribute` = `value`, or,
// when no group names an attribute, by quota proportional to `share`.
struct SynthErrorGroup {
  std::string name;
  double share = 1.0;
  std::optional<std::string> attribute;
  std::optional<std::string> value;
  double substitution = 0.0;
  double insertion = 0.0;
  double deletion = 0.0;
};

struct SynthSpec {
  std::uint64_t seed = 0;
  std::size_t speakers = 60;
  std::size_t utterances_per_speaker = 33;
  std::size_t distinct_transcripts_per_speaker = 12;
  // Used with the built-in command lexicon when `intent_inventory` is empty.
  std::size_t intents = 8;
  std::size_t transcripts_per_intent = 15;
  std::vector<SynthAttribute> attributes;
  std::vector<SynthIntent> intent_inventory;
  std::vector<SynthErrorGroup> error_groups;
  bool hypotheses = true;
  bool audio_refs = false;
};

// 60 speakers, 8 intents x 15 transcripts, two binary attributes and two
// equally sized ASR groups with substitution rates 0.02 and 0.10.
SynthSpec default_synth_spec();

// Number of intents in the built-in lexicon.
std::size_t builtin_intent_count();

// Throws ValidationError on out-of-range probabilities, zero counts or an
// inventory too small for the requested transcripts.
void validate(const SynthSpec& spec);

SynthSpec synth_spec_from_json(const nlohmann::json& doc);
nlohmann::ordered_json synth_spec_to_json(const SynthSpec& spec);

struct SynthOutput {
  std::string manifest;
  std::string metadata;
};

Dataset generate_dataset(const SynthSpec& spec);
SynthOutput generate(const SynthSpec& spec);

}  // namespace splitforge

#endif  // SPLITFORGE_SYNTH_HPP_
