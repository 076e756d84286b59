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

#ifndef SPLITFORGE_MANIFEST_HPP_
#define SPLITFORGE_MANIFEST_HPP_

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace splitforge {

using Tokens = std::vector<std::string>;

inline constexpr std::string_view kUnknownCategory = "unknown";

// Lowercases, strips every code point in a Unicode punctuation category
// and splits on Unicode whitespace. Invalid UTF-8 bytes become U+FFFD.
Tokens normalize_transcript(std::string_view raw);

std::string join_tokens(const Tokens& tokens);

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string transcript;
  // Slot values, e.g. {action, object, location}.
  std::vector<std::string> intent;
  std::optional<std::string> asr_hypothesis;
  std::optional<std::string> audio_ref;

  friend bool operator==(const UtteranceRecord&,
                         const UtteranceRecord&) = default;
};

struct SpeakerProfile {
  std::string speaker_id;
  std::map<std::string, std::string> attributes;

  friend bool operator==(const SpeakerProfile&,
                         const SpeakerProfile&) = default;
};

// Immutable, validated and indexed collection of utterances.
//
// Besides the string-keyed indexes, every record gets dense integer ids
// for its speaker, normalized transcript and intent tuple; all three are
// numbered in sorted key order so they are stable across runs.
class Dataset {
 public:
  // Validates and indexes. Throws ValidationError on duplicate ids,
  // empty normalized transcripts, inconsistent intent arity, or profiles
  // whose attribute names differ. Speakers without a profile get one
  // with every attribute set to "unknown"; their ids are appended to
  // `warnings` when it is non-null.
  Dataset(std::vector<UtteranceRecord> records,
          std::map<std::string, SpeakerProfile> profiles,
          std::vector<std::string>* warnings = nullptr);

  std::size_t size() const { return records_.size(); }
  const std::vector<UtteranceRecord>& records() const { return records_; }
  const UtteranceRecord& record(std::size_t i) const { return records_[i]; }
  const std::map<std::string, SpeakerProfile>& profiles() const {
    return profiles_;
  }
  const std::vector<std::string>& attribute_names() const {
    return attribute_names_;
  }
  std::size_t intent_arity() const { return intent_arity_; }

  std::optional<std::size_t> find(std::string_view utterance_id) const;

  const Tokens& tokens(std::size_t i) const { return tokens_[i]; }
  const std::string& transcript_key(std::size_t i) const {
    return transcript_keys_[transcript_of_[i]];
  }

  // normalized transcript -> utterance ids
  const std::map<std::string, std::set<std::string>>& transcript_index() const {
    return transcript_index_;
  }
  // speaker id -> utterance ids
  const std::map<std::string, std::set<std::string>>& speaker_index() const {
    return speaker_index_;
  }

  std::size_t speaker_count() const { return speaker_ids_.size(); }
  std::size_t transcript_count() const { return transcript_keys_.size(); }
  std::size_t intent_count() const { return intent_keys_.size(); }

  std::size_t speaker_of(std::size_t i) const { return speaker_of_[i]; }
  std::size_t transcript_of(std::size_t i) const { return transcript_of_[i]; }
  std::size_t intent_of(std::size_t i) const { return intent_of_[i]; }

  const std::string& speaker_id(std::size_t s) const { return speaker_ids_[s]; }
  const std::string& transcript(std::size_t t) const {
    return transcript_keys_[t];
  }
  const Tokens& transcript_tokens(std::size_t t) const {
    return transcript_tokens_[t];
  }
  const std::string& intent_key(std::size_t c) const { return intent_keys_[c]; }

  // Demographic attribute values of speaker s, in attribute_names() order.
  const std::vector<std::string>& demographics(std::size_t s) const {
    return demographics_[s];
  }

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.records_ == b.records_ && a.profiles_ == b.profiles_;
  }

 private:
  std::vector<UtteranceRecord> records_;
  std::map<std::string, SpeakerProfile> profiles_;
  std::vector<std::string> attribute_names_;
  std::size_t intent_arity_ = 0;

  std::map<std::string, std::size_t, std::less<>> by_id_;
  std::vector<Tokens> tokens_;
  std::map<std::string, std::set<std::string>> transcript_index_;
  std::map<std::string, std::set<std::string>> speaker_index_;

  std::vector<std::string> speaker_ids_;
  std::vector<std::string> transcript_keys_;
  std::vector<Tokens> transcript_tokens_;
  std::vector<std::string> intent_keys_;
  std::vector<std::vector<std::string>> demographics_;
  std::vector<std::size_t> speaker_of_;
  std::vector<std::size_t> transcript_of_;
  std::vector<std::size_t> intent_of_;
};

// Parses the manifest and speaker-metadata CSV documents.
//
// Manifest columns: utterance_id, speaker_id, transcript, intent (slots
// joined by '|'), optional asr_hypothesis and audio_ref. An empty
// optional cell means the value is absent. Metadata columns: speaker_id
// plus one column per categorical attribute; empty cells read as
// "unknown".
Dataset parse_manifest(std::string_view manifest_text,
                       std::string_view metadata_text,
                       std::vector<std::string>* warnings = nullptr);

// Inverse of parse_manifest for the two documents. Optional columns are
// written only when at least one record carries a value.
std::string write_manifest(const Dataset& dataset);
std::string write_metadata(const Dataset& dataset);

}  // namespace splitforge

#endif  // SPLITFORGE_MANIFEST_HPP_
