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

#include "splitforge/manifest.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>

#include "splitforge/csv.hpp"
#include "splitforge/errors.hpp"

namespace splitforge {

Tokens normalize_transcript(std::string_view raw) {
  Tokens tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };

  const auto* bytes = reinterpret_cast<const uint8_t*>(raw.data());
  const auto length = static_cast<int32_t>(raw.size());
  int32_t offset = 0;
  while (offset < length) {
    UChar32 c;
    U8_NEXT(bytes, offset, length, c);
    if (c < 0) c = 0xFFFD;
    if (u_isUWhiteSpace(c)) {
      flush();
      continue;
    }
    if (u_ispunct(c)) continue;
    c = u_tolower(c);
    char buffer[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buffer, n, c);
    current.append(buffer, static_cast<std::size_t>(n));
  }
  flush();
  return tokens;
}

std::string join_tokens(const Tokens& tokens) {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token;
  }
  return out;
}

namespace {

template <typename Key>
std::vector<Key> sorted_unique(std::vector<Key> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

template <typename Key>
std::size_t rank_of(const std::vector<Key>& sorted, const Key& key) {
  return static_cast<std::size_t>(
      std::lower_bound(sorted.begin(), sorted.end(), key) - sorted.begin());
}

std::string join_intent(const std::vector<std::string>& slots) {
  std::string out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (i) out.push_back('|');
    out += slots[i];
  }
  return out;
}

std::vector<std::string> split_intent(const std::string& text) {
  std::vector<std::string> slots;
  std::size_t start = 0;
  while (true) {
    const auto bar = text.find('|', start);
    slots.push_back(text.substr(start, bar - start));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return slots;
}

}  // namespace

Dataset::Dataset(std::vector<UtteranceRecord> records,
                 std::map<std::string, SpeakerProfile> profiles,
                 std::vector<std::string>* warnings)
    : records_(std::move(records)), profiles_(std::move(profiles)) {
  if (records_.empty()) throw ValidationError("dataset has no utterances");

  // Attribute schema comes from the first profile; all must agree.
  if (!profiles_.empty()) {
    for (const auto& [name, value] : profiles_.begin()->second.attributes) {
      attribute_names_.push_back(name);
    }
  }
  for (const auto& [id, profile] : profiles_) {
    if (profile.attributes.size() != attribute_names_.size() ||
        !std::equal(attribute_names_.begin(), attribute_names_.end(),
                    profile.attributes.begin(),
                    [](const std::string& name, const auto& entry) {
                      return name == entry.first;
                    })) {
      throw ValidationError("speaker '" + id +
                            "' has a different attribute set than the others");
    }
  }

  intent_arity_ = records_.front().intent.size();
  tokens_.reserve(records_.size());
  std::vector<std::string> keys;
  std::vector<std::string> speakers;
  std::vector<std::string> intents;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    const std::string row = "row " + std::to_string(i + 1) + " ('" +
                            r.utterance_id + "')";
    if (r.utterance_id.empty()) {
      throw ValidationError("row " + std::to_string(i + 1) +
                            ": empty utterance_id");
    }
    if (!by_id_.emplace(r.utterance_id, i).second) {
      throw ValidationError("duplicate utterance_id '" + r.utterance_id + "'");
    }
    if (r.speaker_id.empty()) throw ValidationError(row + ": empty speaker_id");
    if (r.intent.empty() ||
        std::all_of(r.intent.begin(), r.intent.end(),
                    [](const std::string& s) { return s.empty(); })) {
      throw ValidationError(row + ": empty intent");
    }
    if (r.intent.size() != intent_arity_) {
      throw ValidationError(row + ": intent has " +
                            std::to_string(r.intent.size()) +
                            " slots, expected " +
                            std::to_string(intent_arity_));
    }
    auto tokens = normalize_transcript(r.transcript);
    if (tokens.empty()) {
      throw ValidationError(row + ": transcript is empty after normalization");
    }
    keys.push_back(join_tokens(tokens));
    tokens_.push_back(std::move(tokens));
    speakers.push_back(r.speaker_id);
    intents.push_back(join_intent(r.intent));
  }

  transcript_keys_ = sorted_unique(keys);
  speaker_ids_ = sorted_unique(speakers);
  intent_keys_ = sorted_unique(intents);

  speaker_of_.resize(records_.size());
  transcript_of_.resize(records_.size());
  intent_of_.resize(records_.size());
  transcript_tokens_.resize(transcript_keys_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    speaker_of_[i] = rank_of(speaker_ids_, speakers[i]);
    transcript_of_[i] = rank_of(transcript_keys_, keys[i]);
    intent_of_[i] = rank_of(intent_keys_, intents[i]);
    transcript_tokens_[transcript_of_[i]] = tokens_[i];
    transcript_index_[keys[i]].insert(records_[i].utterance_id);
    speaker_index_[speakers[i]].insert(records_[i].utterance_id);
  }

  // Drop profiles for speakers without utterances; fill in missing ones.
  for (auto it = profiles_.begin(); it != profiles_.end();) {
    it = speaker_index_.contains(it->first) ? std::next(it) : profiles_.erase(it);
  }
  for (const auto& speaker : speaker_ids_) {
    if (profiles_.contains(speaker)) continue;
    SpeakerProfile profile{speaker, {}};
    for (const auto& name : attribute_names_) {
      profile.attributes[name] = std::string(kUnknownCategory);
    }
    profiles_.emplace(speaker, std::move(profile));
    if (warnings) {
      warnings->push_back("speaker '" + speaker +
                          "' has no metadata row; attributes set to unknown");
    }
  }

  demographics_.reserve(speaker_ids_.size());
  for (const auto& speaker : speaker_ids_) {
    std::vector<std::string> values;
    for (const auto& [name, value] : profiles_.at(speaker).attributes) {
      values.push_back(value);
    }
    demographics_.push_back(std::move(values));
  }
}

std::optional<std::size_t> Dataset::find(std::string_view utterance_id) const {
  const auto it = by_id_.find(utterance_id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

Dataset parse_manifest(std::string_view manifest_text,
                       std::string_view metadata_text,
                       std::vector<std::string>* warnings) {
  const auto manifest = csv::parse(manifest_text);
  auto required = [&](std::string_view name, const csv::Table& table,
                       std::string_view what) {
    const auto col = table.column(name);
    if (!col) {
      throw ValidationError(std::string(what) + " is missing required column '" +
                            std::string(name) + "'");
    }
    return *col;
  };
  const auto id_col = required("utterance_id", manifest, "manifest");
  const auto speaker_col = required("speaker_id", manifest, "manifest");
  const auto transcript_col = required("transcript", manifest, "manifest");
  const auto intent_col = required("intent", manifest, "manifest");
  const auto hyp_col = manifest.column("asr_hypothesis");
  const auto audio_col = manifest.column("audio_ref");

  std::vector<UtteranceRecord> records;
  records.reserve(manifest.rows.size());
  for (const auto& row : manifest.rows) {
    UtteranceRecord r;
    r.utterance_id = row[id_col];
    r.speaker_id = row[speaker_col];
    r.transcript = row[transcript_col];
    r.intent = split_intent(row[intent_col]);
    if (hyp_col && !row[*hyp_col].empty()) r.asr_hypothesis = row[*hyp_col];
    if (audio_col && !row[*audio_col].empty()) r.audio_ref = row[*audio_col];
    records.push_back(std::move(r));
  }

  const auto metadata = csv::parse(metadata_text);
  std::map<std::string, SpeakerProfile> profiles;
  if (!metadata.header.empty()) {
    const auto sid_col = required("speaker_id", metadata, "speaker metadata");
    for (const auto& row : metadata.rows) {
      SpeakerProfile profile{row[sid_col], {}};
      for (std::size_t c = 0; c < metadata.header.size(); ++c) {
        if (c == sid_col) continue;
        profile.attributes[metadata.header[c]] =
            row[c].empty() ? std::string(kUnknownCategory) : row[c];
      }
      if (profile.speaker_id.empty()) {
        throw ValidationError("speaker metadata has a row with empty speaker_id");
      }
      const auto id = profile.speaker_id;
      if (!profiles.emplace(id, std::move(profile)).second) {
        throw ValidationError("speaker metadata lists '" + id + "' twice");
      }
    }
  } else {
    throw ValidationError("speaker metadata is missing required column 'speaker_id'");
  }
  return Dataset(std::move(records), std::move(profiles), warnings);
}

std::string write_manifest(const Dataset& dataset) {
  const auto& records = dataset.records();
  const bool has_hyp = std::any_of(records.begin(), records.end(), [](const auto& r) {
    return r.asr_hypothesis.has_value();
  });
  const bool has_audio = std::any_of(records.begin(), records.end(), [](const auto& r) {
    return r.audio_ref.has_value();
  });
  std::vector<std::string> header{"utterance_id", "speaker_id", "transcript",
                                  "intent"};
  if (has_hyp) header.push_back("asr_hypothesis");
  if (has_audio) header.push_back("audio_ref");
  std::string out = csv::format_row(header);
  for (const auto& r : records) {
    std::vector<std::string> row{r.utterance_id, r.speaker_id, r.transcript,
                                 join_intent(r.intent)};
    if (has_hyp) row.push_back(r.asr_hypothesis.value_or(""));
    if (has_audio) row.push_back(r.audio_ref.value_or(""));
    out += csv::format_row(row);
  }
  return out;
}

std::string write_metadata(const Dataset& dataset) {
  std::vector<std::string> header{"speaker_id"};
  header.insert(header.end(), dataset.attribute_names().begin(),
                dataset.attribute_names().end());
  std::string out = csv::format_row(header);
  for (const auto& [id, profile] : dataset.profiles()) {
    std::vector<std::string> row{id};
    for (const auto& [name, value] : profile.attributes) row.push_back(value);
    out += csv::format_row(row);
  }
  return out;
}

}  // namespace splitforge
