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

#ifndef SPLITFORGE_TESTS_SUPPORT_FIXTURES_HPP_
#define SPLITFORGE_TESTS_SUPPORT_FIXTURES_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "splitforge/manifest.hpp"
#include "splitforge/rng.hpp"

namespace fixtures {

struct Row {
  std::string id;
  std::string speaker;
  std::string transcript;
  std::string intent;  // slots joined by '|'
  std::optional<std::string> hypothesis = std::nullopt;
};

inline splitforge::Dataset make_dataset(
    const std::vector<Row>& rows,
    const std::map<std::string, std::map<std::string, std::string>>& speakers = {}) {
  std::vector<splitforge::UtteranceRecord> records;
  for (const auto& r : rows) {
    splitforge::UtteranceRecord rec;
    rec.utterance_id = r.id;
    rec.speaker_id = r.speaker;
    rec.transcript = r.transcript;
    std::string slot;
    for (const char c : r.intent) {
      if (c == '|') {
        rec.intent.push_back(slot);
        slot.clear();
      } else {
        slot += c;
      }
    }
    rec.intent.push_back(slot);
    rec.asr_hypothesis = r.hypothesis;
    records.push_back(std::move(rec));
  }
  std::map<std::string, splitforge::SpeakerProfile> profiles;
  for (const auto& [id, attrs] : speakers) profiles[id] = {id, attrs};
  return splitforge::Dataset(std::move(records), std::move(profiles));
}

// Speakers spk00..spkNN, each with `per_speaker` utterances drawn from a
// small vocabulary, random demographics over two binary attributes and
// hypotheses with random substitutions.
inline splitforge::Dataset random_dataset(std::uint64_t seed, std::size_t speakers,
                                          std::size_t per_speaker,
                                          std::size_t transcripts = 12) {
  splitforge::Rng rng(seed);
  static const std::vector<std::string> words = {"turn", "on", "off", "the", "lights",
                                                 "music", "up", "down", "kitchen", "now"};
  std::vector<std::string> pool;
  std::vector<std::string> intents;
  while (pool.size() < transcripts) {
    std::string t;
    const auto len = 1 + rng.below(5);
    for (std::size_t k = 0; k < len; ++k) t += (k ? " " : "") + words[rng.below(words.size())];
    if (std::find(pool.begin(), pool.end(), t) != pool.end()) continue;
    pool.push_back(t);
    intents.push_back("i" + std::to_string(rng.below(3)) + "|x");
  }
  std::vector<Row> rows;
  std::map<std::string, std::map<std::string, std::string>> profiles;
  for (std::size_t s = 0; s < speakers; ++s) {
    const auto sid = "spk" + std::string(s < 10 ? "0" : "") + std::to_string(s);
    profiles[sid] = {{"a", rng.bernoulli(0.5) ? "x" : "y"}, {"b", rng.bernoulli(0.3) ? "p" : "q"}};
    for (std::size_t u = 0; u < per_speaker; ++u) {
      const auto t = rng.below(pool.size());
      std::string hyp;
      std::string word;
      for (const char c : pool[t] + " ") {
        if (c != ' ') {
          word += c;
          continue;
        }
        const double x = rng.uniform();
        if (x < 0.1) word = "zzz";
        if (x > 0.95) word.clear();
        if (!word.empty()) hyp += (hyp.empty() ? "" : " ") + word;
        word.clear();
      }
      rows.push_back({sid + "_" + std::to_string(u), sid, pool[t], intents[t],
                      hyp.empty() ? std::nullopt : std::optional<std::string>(hyp)});
    }
  }
  return make_dataset(rows, profiles);
}

}  // namespace fixtures

#endif  // SPLITFORGE_TESTS_SUPPORT_FIXTURES_HPP_
