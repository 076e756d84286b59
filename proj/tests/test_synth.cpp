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

#include "splitforge/synth.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

#include "splitforge/errors.hpp"
#include "splitforge/textmetrics.hpp"

namespace splitforge {
namespace {

TEST(Synth, DefaultShape) {
  const auto d = generate_dataset(default_synth_spec());
  EXPECT_EQ(d.size(), 60u * 33u);
  EXPECT_EQ(d.speaker_count(), 60u);
  EXPECT_EQ(d.transcript_count(), 120u);
  EXPECT_EQ(d.intent_count(), 8u);
  EXPECT_EQ(d.attribute_names().size(), 2u);
  EXPECT_EQ(d.record(0).speaker_id, "spk001");
  EXPECT_EQ(d.record(0).utterance_id, "utt0001");
  std::map<std::size_t, std::set<std::size_t>> distinct;
  for (std::size_t i = 0; i < d.size(); ++i) distinct[d.speaker_of(i)].insert(d.transcript_of(i));
  for (const auto& [speaker, transcripts] : distinct) {
    EXPECT_EQ(transcripts.size(), 12u) << speaker;
  }
}

TEST(Synth, ByteIdenticalForTheSameSeed) {
  auto spec = default_synth_spec();
  spec.seed = 17;
  const auto a = generate(spec);
  const auto b = generate(spec);
  EXPECT_EQ(a.manifest, b.manifest);
  EXPECT_EQ(a.metadata, b.metadata);
  spec.seed = 18;
  EXPECT_NE(generate(spec).manifest, a.manifest);
}

TEST(Synth, OutputParsesBackToTheSameDataset) {
  auto spec = default_synth_spec();
  spec.audio_refs = true;
  const auto out = generate(spec);
  std::vector<std::string> warnings;
  const auto parsed = parse_manifest(out.manifest, out.metadata, &warnings);
  EXPECT_TRUE(warnings.empty());
  EXPECT_EQ(parsed, generate_dataset(spec));
  EXPECT_TRUE(parsed.record(0).audio_ref.has_value());
}

TEST(Synth, ZeroCorruptionGivesExactHypotheses) {
  auto spec = default_synth_spec();
  spec.speakers = 10;
  for (auto& g : spec.error_groups) g.substitution = g.insertion = g.deletion = 0.0;
  const auto d = generate_dataset(spec);
  std::vector<AlignmentCounts> counts;
  for (std::size_t i = 0; i < d.size(); ++i) {
    ASSERT_TRUE(d.record(i).asr_hypothesis.has_value());
    counts.push_back(wer_align(d.tokens(i), normalize_transcript(*d.record(i).asr_hypothesis)));
  }
  EXPECT_DOUBLE_EQ(wer_rates(counts).wer, 0.0);
}

TEST(Synth, PlantedRatesAreRecovered) {
  auto spec = default_synth_spec();
  spec.error_groups = {{"clean", 1.0, "gender", "female", 0.02, 0.01, 0.01},
                       {"noisy", 1.0, "gender", "male", 0.10, 0.01, 0.01}};
  const auto d = generate_dataset(spec);
  const auto gender = std::find(d.attribute_names().begin(), d.attribute_names().end(),
                                "gender") - d.attribute_names().begin();
  std::map<std::string, AlignmentCounts> by_group;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto& hyp = d.record(i).asr_hypothesis;
    const auto& value = d.demographics(d.speaker_of(i))[gender];
    by_group[value] += wer_align(d.tokens(i), hyp ? normalize_transcript(*hyp) : Tokens{});
  }
  ASSERT_EQ(by_group.size(), 2u);
  for (const auto& [value, counts] : by_group) {
    ASSERT_GE(counts.reference_length, 2000u) << value;
    const auto rates = wer_rates(counts);
    const double planted = value == "female" ? 0.02 : 0.10;
    EXPECT_NEAR(rates.substitution, planted, 0.02) << value;
    EXPECT_NEAR(rates.insertion, 0.01, 0.02) << value;
    EXPECT_NEAR(rates.deletion, 0.01, 0.02) << value;
  }
}

TEST(Synth, DemographicFrequenciesFollowWeights) {
  auto spec = default_synth_spec();
  spec.speakers = 500;
  spec.utterances_per_speaker = 2;
  spec.distinct_transcripts_per_speaker = 2;
  spec.hypotheses = false;
  const auto d = generate_dataset(spec);
  std::map<std::string, double> english;
  for (const auto& [id, profile] : d.profiles()) {
    english[profile.attributes.at("first_language")] += 1.0 / 500.0;
  }
  EXPECT_NEAR(english["english"], 0.6, 0.05);
  EXPECT_NEAR(english["other"], 0.4, 0.05);
}

TEST(Synth, RejectsInvalidSpecs) {
  auto spec = default_synth_spec();
  spec.transcripts_per_intent = 1000;
  EXPECT_THROW(validate(spec), ValidationError);
  spec = default_synth_spec();
  spec.intents = builtin_intent_count() + 1;
  EXPECT_THROW(validate(spec), ValidationError);
  spec = default_synth_spec();
  spec.error_groups[0].substitution = 1.5;
  EXPECT_THROW(validate(spec), ValidationError);
  spec = default_synth_spec();
  spec.speakers = 0;
  EXPECT_THROW(validate(spec), ValidationError);
  spec = default_synth_spec();
  spec.error_groups[0].attribute = "height";
  spec.error_groups[0].value = "tall";
  EXPECT_THROW(validate(spec), ValidationError);
  spec = default_synth_spec();
  spec.distinct_transcripts_per_speaker = spec.intents * spec.transcripts_per_intent + 1;
  EXPECT_THROW(validate(spec), ValidationError);
}

TEST(Synth, JsonRoundTripAndUnknownFields) {
  auto spec = default_synth_spec();
  spec.seed = 4;
  spec.speakers = 12;
  const auto j = synth_spec_to_json(spec);
  EXPECT_EQ(synth_spec_to_json(synth_spec_from_json(j)), j);
  auto bad = nlohmann::json::parse(j.dump());
  bad["speakerz"] = 3;
  EXPECT_THROW(synth_spec_from_json(bad), ValidationError);
}

TEST(Synth, CustomInventory) {
  SynthSpec spec;
  spec.speakers = 4;
  spec.utterances_per_speaker = 3;
  spec.distinct_transcripts_per_speaker = 2;
  spec.intents = 2;
  spec.transcripts_per_intent = 2;
  spec.attributes = {{"region", {{"north", 1.0}}}};
  spec.intent_inventory = {{{"play", "music"}, {"play music", "start the music"}},
                           {{"stop", "music"}, {"stop music", "halt the music"}}};
  const auto d = generate_dataset(spec);
  EXPECT_EQ(d.size(), 12u);
  EXPECT_EQ(d.intent_arity(), 2u);
  EXPECT_LE(d.transcript_count(), 4u);
}

}  // namespace
}  // namespace splitforge
