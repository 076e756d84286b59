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

#include "splitforge/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "splitforge/errors.hpp"

namespace splitforge {

namespace {

double percent(std::size_t part, std::size_t whole) {
  return 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

TestSetStats test_set_stats(const Dataset& dataset,
                            const std::vector<Partition>& of, Partition which,
                            const std::set<std::size_t>& train_speakers,
                            const std::set<std::size_t>& train_transcripts,
                            const std::vector<Tokens>& train_pool,
                            const AuditOptions& options) {
  TestSetStats stats;
  stats.partition = which;
  std::set<std::size_t> speakers;
  std::set<std::size_t> transcripts;
  std::vector<Tokens> test_tokens;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (of[i] != which) continue;
    ++stats.size;
    speakers.insert(dataset.speaker_of(i));
    transcripts.insert(dataset.transcript_of(i));
    test_tokens.push_back(dataset.tokens(i));
    const auto& hyp = dataset.record(i).asr_hypothesis;
    if (hyp) {
      stats.alignment += wer_align(dataset.tokens(i), normalize_transcript(*hyp));
      ++stats.with_hypothesis;
    } else {
      ++stats.without_hypothesis;
    }
  }
  stats.speakers = speakers.size();
  stats.transcripts = transcripts.size();
  if (stats.size == 0) return stats;

  const auto seen_speakers = std::count_if(
      speakers.begin(), speakers.end(),
      [&](std::size_t s) { return train_speakers.contains(s); });
  const auto seen_transcripts = std::count_if(
      transcripts.begin(), transcripts.end(),
      [&](std::size_t t) { return train_transcripts.contains(t); });
  stats.speaker_coverage =
      percent(static_cast<std::size_t>(seen_speakers), speakers.size());
  stats.utterance_coverage =
      percent(static_cast<std::size_t>(seen_transcripts), transcripts.size());
  if (!train_speakers.empty()) {
    stats.speaker_kl = demographic_kl(dataset, speakers, train_speakers,
                                      options.demographic_mode, options.smoothing);
  }
  if (stats.alignment.reference_length > 0) stats.wer = wer_rates(stats.alignment);
  for (std::size_t k = 1; k <= kMaxNgramOrder; ++k) {
    try {
      stats.ngram_overlap[k - 1] =
          corpus_ngram_overlap(test_tokens, train_pool, k, options.parallelism);
    } catch (const std::domain_error&) {
      // No test transcript reaches this order.
    }
  }
  return stats;
}

}  // namespace

SplitReport audit(const Dataset& dataset, const SplitAssignment& assignment,
                  const AuditOptions& options) {
  std::vector<std::string> unknown;
  for (const auto& [id, p] : assignment.partition) {
    if (!dataset.find(id)) unknown.push_back(id);
  }
  std::vector<Partition> of(dataset.size());
  std::vector<std::string> missing;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto it = assignment.partition.find(dataset.record(i).utterance_id);
    if (it == assignment.partition.end()) {
      missing.push_back(dataset.record(i).utterance_id);
    } else {
      of[i] = it->second;
    }
  }
  auto listing = [](const std::vector<std::string>& ids) {
    std::string out;
    for (std::size_t i = 0; i < ids.size() && i < 20; ++i) {
      out += (i ? ", " : "") + ids[i];
    }
    if (ids.size() > 20) out += fmt::format(", ... ({} total)", ids.size());
    return out;
  };
  if (!unknown.empty()) {
    throw ValidationError("assignment names utterances absent from the manifest: " +
                          listing(unknown));
  }
  if (!missing.empty()) {
    throw ValidationError("assignment leaves utterances unassigned: " +
                          listing(missing));
  }

  SplitReport report;
  report.provenance = assignment.provenance;
  std::set<std::size_t> train_speakers;
  std::set<std::size_t> train_transcripts;
  std::vector<std::size_t> train_intents(dataset.intent_count(), 0);
  std::vector<std::size_t> valid_intents(dataset.intent_count(), 0);
  AlignmentCounts all;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    ++report.sizes[static_cast<std::size_t>(of[i])];
    if (of[i] == Partition::kTrain) {
      train_speakers.insert(dataset.speaker_of(i));
      train_transcripts.insert(dataset.transcript_of(i));
      ++train_intents[dataset.intent_of(i)];
    } else if (of[i] == Partition::kValid) {
      ++valid_intents[dataset.intent_of(i)];
    }
    const auto& hyp = dataset.record(i).asr_hypothesis;
    if (hyp) {
      all += wer_align(dataset.tokens(i), normalize_transcript(*hyp));
      ++report.dataset_with_hypothesis;
    }
  }
  if (all.reference_length > 0) report.dataset_wer = wer_rates(all);

  std::vector<Tokens> train_pool;
  for (const auto t : train_transcripts) {
    train_pool.push_back(dataset.transcript_tokens(t));
  }
  for (const auto which : {Partition::kTestSpeaker, Partition::kTestUtterance}) {
    report.test_sets.push_back(test_set_stats(dataset, of, which, train_speakers,
                                              train_transcripts, train_pool,
                                              options));
  }

  const auto n_train = report.sizes[static_cast<std::size_t>(Partition::kTrain)];
  const auto n_valid = report.sizes[static_cast<std::size_t>(Partition::kValid)];
  if (n_train > 0 && n_valid > 0) {
    double l1 = 0.0;
    for (std::size_t c = 0; c < dataset.intent_count(); ++c) {
      l1 += std::abs(static_cast<double>(train_intents[c]) / static_cast<double>(n_train) -
                     static_cast<double>(valid_intents[c]) / static_cast<double>(n_valid));
    }
    report.intent_l1_train_valid = l1;
  }
  return report;
}

namespace {

template <typename T>
nlohmann::ordered_json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::ordered_json(*value) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json rates_json(const std::optional<WerRates>& rates) {
  if (!rates) return nullptr;
  return {{"substitution", rates->substitution},
          {"insertion", rates->insertion},
          {"deletion", rates->deletion},
          {"wer", rates->wer}};
}

}  // namespace

nlohmann::ordered_json report_to_json(const SplitReport& report) {
  nlohmann::ordered_json stats;
  nlohmann::ordered_json sizes;
  for (const auto p : kPartitions) {
    sizes[std::string(to_string(p))] = report.sizes[static_cast<std::size_t>(p)];
  }
  stats["sizes"] = sizes;
  nlohmann::ordered_json sets = nlohmann::ordered_json::object();
  for (const auto& t : report.test_sets) {
    nlohmann::ordered_json overlap = nlohmann::ordered_json::array();
    for (const auto& v : t.ngram_overlap) overlap.push_back(optional_json(v));
    sets[std::string(to_string(t.partition))] = {
        {"size", t.size},
        {"speakers", t.speakers},
        {"transcripts", t.transcripts},
        {"speaker_coverage_pct", optional_json(t.speaker_coverage)},
        {"utterance_coverage_pct", optional_json(t.utterance_coverage)},
        {"speaker_kl", optional_json(t.speaker_kl)},
        {"with_hypothesis", t.with_hypothesis},
        {"without_hypothesis", t.without_hypothesis},
        {"alignment",
         {{"substitutions", t.alignment.substitutions},
          {"insertions", t.alignment.insertions},
          {"deletions", t.alignment.deletions},
          {"reference_length", t.alignment.reference_length}}},
        {"wer", rates_json(t.wer)},
        {"ngram_overlap_pct", overlap},
    };
  }
  stats["test_sets"] = sets;
  stats["intent_l1_train_valid"] = optional_json(report.intent_l1_train_valid);
  stats["dataset_wer"] = rates_json(report.dataset_wer);
  stats["dataset_with_hypothesis"] = report.dataset_with_hypothesis;

  nlohmann::ordered_json out;
  out["provenance"] = {{"preset", report.provenance.preset},
                       {"config_digest", report.provenance.config_digest},
                       {"seed", report.provenance.seed},
                       {"tool_version", report.provenance.tool_version}};
  out["statistics"] = stats;
  return out;
}

namespace {

std::string pct(const std::optional<double>& v) {
  return v ? fmt::format("{:.1f}%", *v) : "n/a";
}

std::string num(const std::optional<double>& v, int digits = 4) {
  return v ? fmt::format("{:.{}f}", *v, digits) : "n/a";
}

std::string rate(const std::optional<WerRates>& r, double WerRates::*field) {
  return r ? fmt::format("{:.1f}", 100.0 * ((*r).*field)) : "n/a";
}

// Renders rows of cells with per-column widths.
std::string tabulate(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::string out;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line;
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      if (c == 0) {
        line += fmt::format("{:<{}}", rows[r][c], width[c]);
      } else {
        line += fmt::format("  {:>{}}", rows[r][c], width[c]);
      }
    }
    out += line + "\n";
    if (r == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c ? 2 : 0);
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

}  // namespace

std::string render_table(const SplitReport& report) {
  std::vector<std::vector<std::string>> coverage{
      {"Test Set", "Speaker Coverage", "Utterance Coverage", "Speaker KL", "Test Size"}};
  std::vector<std::vector<std::string>> wer{{"Test Set", "% S", "% I", "% D", "% WER", "Hyp."}};
  std::vector<std::vector<std::string>> ngram{{"Test Set", "1", "2", "3", "4"}};
  for (const auto& t : report.test_sets) {
    const std::string name(to_string(t.partition));
    coverage.push_back({name, pct(t.speaker_coverage), pct(t.utterance_coverage),
                        num(t.speaker_kl), std::to_string(t.size)});
    wer.push_back({name, rate(t.wer, &WerRates::substitution),
                   rate(t.wer, &WerRates::insertion), rate(t.wer, &WerRates::deletion),
                   rate(t.wer, &WerRates::wer),
                   fmt::format("{}/{}", t.with_hypothesis, t.size)});
    std::vector<std::string> row{name};
    for (const auto& v : t.ngram_overlap) row.push_back(num(v, 1));
    ngram.push_back(row);
  }
  wer.push_back({"(dataset)", rate(report.dataset_wer, &WerRates::substitution),
                 rate(report.dataset_wer, &WerRates::insertion),
                 rate(report.dataset_wer, &WerRates::deletion),
                 rate(report.dataset_wer, &WerRates::wer),
                 std::to_string(report.dataset_with_hypothesis)});

  std::string out;
  out += fmt::format("Partition sizes: train {}, valid {}, test_speaker {}, test_utterance {}\n",
                     report.sizes[0], report.sizes[1], report.sizes[2], report.sizes[3]);
  out += fmt::format("Intent L1 (train vs valid): {}\n\n", num(report.intent_l1_train_valid));
  out += tabulate(coverage) + "\n" + tabulate(wer) + "\nN-gram overlap with train (%)\n" +
         tabulate(ngram);
  return out;
}

std::string render_comparison(const std::vector<std::string>& names,
                              const std::vector<SplitReport>& reports) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header{"Metric"};
  header.insert(header.end(), names.begin(), names.end());
  rows.push_back(header);

  auto add = [&](const std::string& label, auto cell) {
    std::vector<std::string> row{label};
    for (const auto& r : reports) row.push_back(cell(r));
    rows.push_back(row);
  };
  for (const auto p : kPartitions) {
    add("size " + std::string(to_string(p)),
        [p](const SplitReport& r) { return std::to_string(r.sizes[static_cast<std::size_t>(p)]); });
  }
  for (std::size_t i = 0; i < 2; ++i) {
    const std::string set = i == 0 ? "test_speaker" : "test_utterance";
    auto stat = [i](const SplitReport& r) -> const TestSetStats& { return r.test_sets[i]; };
    add(set + " speaker coverage", [&](const SplitReport& r) { return pct(stat(r).speaker_coverage); });
    add(set + " utterance coverage", [&](const SplitReport& r) { return pct(stat(r).utterance_coverage); });
    add(set + " speaker KL", [&](const SplitReport& r) { return num(stat(r).speaker_kl); });
    add(set + " % S", [&](const SplitReport& r) { return rate(stat(r).wer, &WerRates::substitution); });
    add(set + " % I", [&](const SplitReport& r) { return rate(stat(r).wer, &WerRates::insertion); });
    add(set + " % D", [&](const SplitReport& r) { return rate(stat(r).wer, &WerRates::deletion); });
    add(set + " % WER", [&](const SplitReport& r) { return rate(stat(r).wer, &WerRates::wer); });
    for (std::size_t k = 0; k < kMaxNgramOrder; ++k) {
      add(fmt::format("{} {}-gram overlap", set, k + 1),
          [&, k](const SplitReport& r) { return num(stat(r).ngram_overlap[k], 1); });
    }
  }
  add("intent L1 train/valid", [](const SplitReport& r) { return num(r.intent_l1_train_valid); });
  return tabulate(rows);
}

}  // namespace splitforge
