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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>

#include "splitforge/errors.hpp"
#include "splitforge/rng.hpp"

namespace splitforge {

namespace {

struct LexiconEntry {
  std::array<const char*, 3> slots;
  std::vector<const char*> cores;
};

// Home-assistant commands in (action, object, location) form.
const std::vector<LexiconEntry>& lexicon() {
  static const std::vector<LexiconEntry> entries = {
      {{"activate", "lights", "kitchen"},
       {"turn on the kitchen lights", "switch on the lights in the kitchen",
        "kitchen lights on", "lights on in the kitchen", "put the kitchen lights on",
        "turn the lights on in the kitchen"}},
      {{"deactivate", "lights", "bedroom"},
       {"turn off the bedroom lights", "switch off the lights in the bedroom",
        "bedroom lights off", "lights off in the bedroom", "kill the bedroom lights",
        "turn the lights off in the bedroom"}},
      {{"increase", "heat", "none"},
       {"turn up the heat", "increase the temperature", "make it warmer",
        "heat up", "turn the heating up", "raise the temperature"}},
      {{"decrease", "heat", "washroom"},
       {"turn down the heat in the washroom", "make the washroom cooler",
        "lower the washroom temperature", "washroom heat down",
        "decrease the heating in the washroom", "cool down the washroom"}},
      {{"activate", "music", "none"},
       {"play some music", "put on music", "start the music", "music on",
        "play a song", "i want to hear music"}},
      {{"decrease", "volume", "none"},
       {"turn the volume down", "make it quieter", "lower the volume",
        "volume down", "too loud", "reduce the sound"}},
      {{"bring", "newspaper", "none"},
       {"bring me the newspaper", "get the newspaper", "fetch the paper",
        "go get me the news paper", "i need the newspaper", "newspaper here"}},
      {{"increase", "volume", "none"},
       {"turn the volume up", "make it louder", "raise the volume", "volume up",
        "i cannot hear it", "increase the sound"}},
      {{"change language", "none", "none"},
       {"change the language", "switch language", "use another language",
        "set a different language", "language settings", "switch to german"}},
      {{"bring", "shoes", "none"},
       {"bring my shoes", "get me my shoes", "fetch the shoes",
        "where are my shoes", "shoes please bring them", "go get my shoes"}},
  };
  return entries;
}

constexpr std::array<const char*, 4> kPrefixes = {"", "please", "could you",
                                                  "hey"};
constexpr std::array<const char*, 3> kSuffixes = {"", "please", "now"};

std::string compose(const char* prefix, const char* core, const char* suffix) {
  std::string out;
  for (const char* part : {prefix, core, suffix}) {
    if (*part == '\0') continue;
    if (!out.empty()) out += ' ';
    out += part;
  }
  return out;
}

std::vector<SynthIntent> builtin_inventory(std::size_t count) {
  std::vector<SynthIntent> out;
  for (std::size_t k = 0; k < count; ++k) {
    const auto& entry = lexicon()[k];
    SynthIntent intent;
    intent.slots.assign(entry.slots.begin(), entry.slots.end());
    for (const char* core : entry.cores) {
      for (const char* prefix : kPrefixes) {
        for (const char* suffix : kSuffixes) {
          if (std::string_view(prefix) == "please" && std::string_view(suffix) == "please") {
            continue;
          }
          intent.paraphrases.push_back(compose(prefix, core, suffix));
        }
      }
    }
    out.push_back(std::move(intent));
  }
  return out;
}

void check_probability(double p, const std::string& what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ValidationError(what + " must lie in [0, 1]");
  }
}

std::string numbered(const char* prefix, std::size_t n, std::size_t total) {
  const int width = std::max<int>(3, static_cast<int>(std::to_string(total).size()));
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

// Largest-remainder split of `total` by `weights`, ties to the earlier entry.
std::vector<std::size_t> apportion(std::size_t total, const std::vector<double>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> quota(weights.size());
  std::vector<double> rest(weights.size());
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double exact = static_cast<double>(total) * weights[j] / sum;
    quota[j] = static_cast<std::size_t>(std::floor(exact));
    rest[j] = exact - std::floor(exact);
    assigned += quota[j];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return rest[a] > rest[b]; });
  for (std::size_t r = 0; assigned < total; ++r, ++assigned) ++quota[order[r % order.size()]];
  return quota;
}

std::vector<SynthIntent> inventory_of(const SynthSpec& spec) {
  return spec.intent_inventory.empty() ? builtin_inventory(spec.intents)
                                       : spec.intent_inventory;
}

}  // namespace

std::size_t builtin_intent_count() { return lexicon().size(); }

SynthSpec default_synth_spec() {
  SynthSpec spec;
  spec.attributes = {
      {"first_language", {{"english", 0.6}, {"other", 0.4}}},
      {"gender", {{"female", 0.5}, {"male", 0.5}}},
  };
  SynthErrorGroup clean{"clean", 0.5, std::nullopt, std::nullopt, 0.02, 0.01, 0.01};
  SynthErrorGroup noisy{"noisy", 0.5, std::nullopt, std::nullopt, 0.10, 0.01, 0.01};
  spec.error_groups = {clean, noisy};
  return spec;
}

void validate(const SynthSpec& spec) {
  if (spec.speakers == 0) throw ValidationError("synth: speakers must be positive");
  if (spec.utterances_per_speaker == 0 || spec.distinct_transcripts_per_speaker == 0) {
    throw ValidationError("synth: per-speaker counts must be positive");
  }
  if (spec.distinct_transcripts_per_speaker > spec.utterances_per_speaker) {
    throw ValidationError(
        "synth: distinct_transcripts_per_speaker exceeds utterances_per_speaker");
  }
  if (spec.intent_inventory.empty()) {
    if (spec.intents == 0 || spec.intents > builtin_intent_count()) {
      throw ValidationError("synth: the built-in lexicon has " +
                            std::to_string(builtin_intent_count()) + " intents, " +
                            std::to_string(spec.intents) + " requested");
    }
  }
  if (spec.transcripts_per_intent == 0) {
    throw ValidationError("synth: transcripts_per_intent must be positive");
  }
  const auto inventory = inventory_of(spec);
  std::size_t arity = inventory.front().slots.size();
  std::set<std::string> seen;
  for (const auto& intent : inventory) {
    if (intent.slots.empty() || intent.slots.size() != arity) {
      throw ValidationError("synth: every intent needs the same positive number of slots");
    }
    std::set<std::string> distinct;
    for (const auto& p : intent.paraphrases) {
      const auto key = join_tokens(normalize_transcript(p));
      if (key.empty()) throw ValidationError("synth: paraphrase '" + p + "' is empty");
      if (!seen.insert(key).second) {
        throw ValidationError("synth: paraphrase '" + p + "' appears more than once");
      }
      distinct.insert(key);
    }
    if (distinct.size() < spec.transcripts_per_intent) {
      std::string name;
      for (const auto& s : intent.slots) name += (name.empty() ? "" : "|") + s;
      throw ValidationError("synth: intent '" + name + "' has " +
                            std::to_string(distinct.size()) +
                            " paraphrases, fewer than the " +
                            std::to_string(spec.transcripts_per_intent) + " requested");
    }
  }
  const auto unique = inventory.size() * spec.transcripts_per_intent;
  if (spec.distinct_transcripts_per_speaker > unique) {
    throw ValidationError("synth: distinct_transcripts_per_speaker exceeds the " +
                          std::to_string(unique) + " available transcripts");
  }
  std::set<std::string> names;
  for (const auto& a : spec.attributes) {
    if (a.name.empty() || a.name == "speaker_id" || !names.insert(a.name).second) {
      throw ValidationError("synth: attribute names must be distinct and non-empty");
    }
    if (a.categories.empty()) {
      throw ValidationError("synth: attribute '" + a.name + "' has no categories");
    }
    double sum = 0.0;
    for (const auto& [category, weight] : a.categories) {
      if (category.empty() || !(weight >= 0.0) || !std::isfinite(weight)) {
        throw ValidationError("synth: attribute '" + a.name +
                              "' has an empty category or a negative weight");
      }
      sum += weight;
    }
    if (!(sum > 0.0)) throw ValidationError("synth: attribute '" + a.name + "' weights sum to 0");
  }
  bool by_attribute = false;
  double share_sum = 0.0;
  for (const auto& g : spec.error_groups) {
    check_probability(g.substitution, "synth: substitution rate of '" + g.name + "'");
    check_probability(g.insertion, "synth: insertion rate of '" + g.name + "'");
    check_probability(g.deletion, "synth: deletion rate of '" + g.name + "'");
    if (g.substitution + g.deletion > 1.0) {
      throw ValidationError("synth: substitution + deletion of '" + g.name + "' exceeds 1");
    }
    if (!(g.share >= 0.0) || !std::isfinite(g.share)) {
      throw ValidationError("synth: share of '" + g.name + "' must be non-negative");
    }
    if (g.attribute.has_value() != g.value.has_value()) {
      throw ValidationError("synth: error group '" + g.name +
                            "' needs both attribute and value or neither");
    }
    if (g.attribute) {
      by_attribute = true;
      if (!names.contains(*g.attribute)) {
        throw ValidationError("synth: error group '" + g.name +
                              "' refers to unknown attribute '" + *g.attribute + "'");
      }
    }
    share_sum += g.share;
  }
  if (!spec.error_groups.empty() && !by_attribute && !(share_sum > 0.0)) {
    throw ValidationError("synth: error group shares sum to 0");
  }
}

Dataset generate_dataset(const SynthSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const auto inventory = inventory_of(spec);

  // Transcript pool: a seeded pick of paraphrases per intent.
  struct Transcript {
    std::string text;
    std::size_t intent;
  };
  std::vector<Transcript> pool;
  for (std::size_t k = 0; k < inventory.size(); ++k) {
    auto paraphrases = inventory[k].paraphrases;
    rng.shuffle(std::span(paraphrases));
    paraphrases.resize(spec.transcripts_per_intent);
    std::sort(paraphrases.begin(), paraphrases.end());
    for (auto& p : paraphrases) pool.push_back({std::move(p), k});
  }

  // Speakers and their attributes.
  std::map<std::string, SpeakerProfile> profiles;
  std::vector<std::string> speaker_ids;
  for (std::size_t s = 0; s < spec.speakers; ++s) {
    SpeakerProfile profile{numbered("spk", s + 1, spec.speakers), {}};
    for (const auto& a : spec.attributes) {
      double sum = 0.0;
      for (const auto& c : a.categories) sum += c.second;
      double u = rng.uniform() * sum;
      std::string chosen = a.categories.back().first;
      for (const auto& [category, weight] : a.categories) {
        if (u < weight) {
          chosen = category;
          break;
        }
        u -= weight;
      }
      profile.attributes[a.name] = chosen;
    }
    speaker_ids.push_back(profile.speaker_id);
    profiles.emplace(profile.speaker_id, std::move(profile));
  }

  // ASR group of each speaker; -1 means no corruption.
  std::vector<int> group_of(spec.speakers, -1);
  const bool by_attribute = std::any_of(spec.error_groups.begin(), spec.error_groups.end(),
                                        [](const auto& g) { return g.attribute.has_value(); });
  if (by_attribute) {
    for (std::size_t s = 0; s < spec.speakers; ++s) {
      const auto& attrs = profiles.at(speaker_ids[s]).attributes;
      for (std::size_t g = 0; g < spec.error_groups.size(); ++g) {
        const auto& group = spec.error_groups[g];
        if (group.attribute && attrs.at(*group.attribute) == *group.value) {
          group_of[s] = static_cast<int>(g);
          break;
        }
      }
    }
  } else if (!spec.error_groups.empty()) {
    std::vector<double> shares;
    for (const auto& g : spec.error_groups) shares.push_back(g.share);
    const auto quota = apportion(spec.speakers, shares);
    std::vector<std::size_t> order(spec.speakers);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    std::size_t next = 0;
    for (std::size_t g = 0; g < quota.size(); ++g) {
      for (std::size_t q = 0; q < quota[g]; ++q) group_of[order[next++]] = static_cast<int>(g);
    }
  }

  // Each speaker draws distinct transcripts from a shuffled deck that is
  // refilled when exhausted, which keeps transcript frequencies balanced.
  std::vector<std::size_t> deck;
  auto refill = [&] {
    std::vector<std::size_t> fresh(pool.size());
    std::iota(fresh.begin(), fresh.end(), std::size_t{0});
    rng.shuffle(std::span(fresh));
    deck.insert(deck.begin(), fresh.begin(), fresh.end());
  };

  std::vector<UtteranceRecord> records;
  std::size_t next_id = 0;
  const std::size_t total = spec.speakers * spec.utterances_per_speaker;
  for (std::size_t s = 0; s < spec.speakers; ++s) {
    std::vector<std::size_t> mine;
    while (mine.size() < spec.distinct_transcripts_per_speaker) {
      if (deck.empty()) refill();
      // Take the first deck entry this speaker does not have yet.
      auto it = std::find_if(deck.rbegin(), deck.rend(), [&](std::size_t t) {
        return std::find(mine.begin(), mine.end(), t) == mine.end();
      });
      if (it == deck.rend()) {
        refill();
        continue;
      }
      mine.push_back(*it);
      deck.erase(std::next(it).base());
    }
    std::vector<std::size_t> said = mine;
    while (said.size() < spec.utterances_per_speaker) {
      said.push_back(mine[rng.below(mine.size())]);
    }
    rng.shuffle(std::span(said));

    for (const auto t : said) {
      UtteranceRecord r;
      r.utterance_id = numbered("utt", ++next_id, total);
      r.speaker_id = speaker_ids[s];
      r.transcript = pool[t].text;
      r.intent = inventory[pool[t].intent].slots;
      if (spec.hypotheses) {
        const auto tokens = normalize_transcript(r.transcript);
        Tokens hyp;
        const SynthErrorGroup* g =
            group_of[s] < 0 ? nullptr : &spec.error_groups[static_cast<std::size_t>(group_of[s])];
        auto oov = [&] { return numbered("oov", rng.below(1000), 999); };
        for (const auto& tok : tokens) {
          if (g != nullptr) {
            const double u = rng.uniform();
            if (u < g->deletion) {
              // dropped
            } else if (u < g->deletion + g->substitution) {
              hyp.push_back(oov());
            } else {
              hyp.push_back(tok);
            }
            if (rng.bernoulli(g->insertion)) hyp.push_back(oov());
          } else {
            hyp.push_back(tok);
          }
        }
        // An empty hypothesis cannot be written; it is left absent.
        if (!hyp.empty()) r.asr_hypothesis = join_tokens(hyp);
      }
      if (spec.audio_refs) r.audio_ref = "audio/" + r.speaker_id + "/" + r.utterance_id + ".wav";
      records.push_back(std::move(r));
    }
  }
  return Dataset(std::move(records), std::move(profiles));
}

SynthOutput generate(const SynthSpec& spec) {
  const auto dataset = generate_dataset(spec);
  return {write_manifest(dataset), write_metadata(dataset)};
}

namespace {

template <typename T>
T get_or(const nlohmann::json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(std::string("synth: field '") + key + "' has the wrong type");
  }
}

std::size_t count_field(const nlohmann::json& doc, const char* key, std::size_t fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc.at(key);
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw ValidationError(std::string("synth: field '") + key +
                          "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

}  // namespace

SynthSpec synth_spec_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValidationError("synth: spec must be a JSON object");
  static const std::set<std::string> known = {
      "seed", "speakers", "utterances_per_speaker", "distinct_transcripts_per_speaker",
      "intents", "transcripts_per_intent", "attributes", "intent_inventory",
      "error_groups", "hypotheses", "audio_refs"};
  for (const auto& [key, _] : doc.items()) {
    if (!known.contains(key)) throw ValidationError("synth: unknown field '" + key + "'");
  }
  const auto defaults = default_synth_spec();
  SynthSpec spec;
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned()) throw ValidationError("synth: seed must be a non-negative integer");
    spec.seed = v.get<std::uint64_t>();
  }
  spec.speakers = count_field(doc, "speakers", defaults.speakers);
  spec.utterances_per_speaker =
      count_field(doc, "utterances_per_speaker", defaults.utterances_per_speaker);
  spec.distinct_transcripts_per_speaker = count_field(
      doc, "distinct_transcripts_per_speaker", defaults.distinct_transcripts_per_speaker);
  spec.intents = count_field(doc, "intents", defaults.intents);
  spec.transcripts_per_intent =
      count_field(doc, "transcripts_per_intent", defaults.transcripts_per_intent);
  spec.hypotheses = get_or<bool>(doc, "hypotheses", true);
  spec.audio_refs = get_or<bool>(doc, "audio_refs", false);

  try {
    if (doc.contains("attributes")) {
      for (const auto& a : doc.at("attributes")) {
        SynthAttribute attr{a.at("name").get<std::string>(), {}};
        for (const auto& c : a.at("categories")) {
          attr.categories.emplace_back(c.at(0).get<std::string>(), c.at(1).get<double>());
        }
        spec.attributes.push_back(std::move(attr));
      }
    } else {
      spec.attributes = defaults.attributes;
    }
    if (doc.contains("intent_inventory")) {
      for (const auto& i : doc.at("intent_inventory")) {
        spec.intent_inventory.push_back({i.at("slots").get<std::vector<std::string>>(),
                                         i.at("paraphrases").get<std::vector<std::string>>()});
      }
    }
    if (doc.contains("error_groups")) {
      for (const auto& g : doc.at("error_groups")) {
        SynthErrorGroup group;
        group.name = g.value("name", std::string());
        group.share = g.value("share", 1.0);
        if (g.contains("attribute")) group.attribute = g.at("attribute").get<std::string>();
        if (g.contains("value")) group.value = g.at("value").get<std::string>();
        group.substitution = g.value("substitution", 0.0);
        group.insertion = g.value("insertion", 0.0);
        group.deletion = g.value("deletion", 0.0);
        spec.error_groups.push_back(std::move(group));
      }
    } else {
      spec.error_groups = defaults.error_groups;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("synth: malformed spec: ") + e.what());
  }
  validate(spec);
  return spec;
}

nlohmann::ordered_json synth_spec_to_json(const SynthSpec& spec) {
  nlohmann::ordered_json doc;
  doc["seed"] = spec.seed;
  doc["speakers"] = spec.speakers;
  doc["utterances_per_speaker"] = spec.utterances_per_speaker;
  doc["distinct_transcripts_per_speaker"] = spec.distinct_transcripts_per_speaker;
  doc["intents"] = spec.intents;
  doc["transcripts_per_intent"] = spec.transcripts_per_intent;
  doc["hypotheses"] = spec.hypotheses;
  doc["audio_refs"] = spec.audio_refs;
  auto& attributes = doc["attributes"] = nlohmann::ordered_json::array();
  for (const auto& a : spec.attributes) {
    nlohmann::ordered_json categories = nlohmann::ordered_json::array();
    for (const auto& [c, w] : a.categories) categories.push_back({c, w});
    attributes.push_back({{"name", a.name}, {"categories", categories}});
  }
  if (!spec.intent_inventory.empty()) {
    auto& inventory = doc["intent_inventory"] = nlohmann::ordered_json::array();
    for (const auto& i : spec.intent_inventory) {
      inventory.push_back({{"slots", i.slots}, {"paraphrases", i.paraphrases}});
    }
  }
  auto& groups = doc["error_groups"] = nlohmann::ordered_json::array();
  for (const auto& g : spec.error_groups) {
    nlohmann::ordered_json group;
    group["name"] = g.name;
    group["share"] = g.share;
    if (g.attribute) group["attribute"] = *g.attribute;
    if (g.value) group["value"] = *g.value;
    group["substitution"] = g.substitution;
    group["insertion"] = g.insertion;
    group["deletion"] = g.deletion;
    groups.push_back(std::move(group));
  }
  return doc;
}

}  // namespace splitforge
