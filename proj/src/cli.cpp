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

#include "splitforge/cli.hpp"

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "splitforge/errors.hpp"
#include "splitforge/report.hpp"

namespace splitforge {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitIo = 4;

std::string_view to_string(MoveRule rule) {
  return rule == MoveRule::kBestImprovement ? "best_improvement" : "first_improvement";
}

MoveRule move_rule_from_string(std::string_view name) {
  if (name == "first_improvement") return MoveRule::kFirstImprovement;
  if (name == "best_improvement") return MoveRule::kBestImprovement;
  throw ValidationError("unknown move rule '" + std::string(name) +
                        "' (expected first_improvement or best_improvement)");
}

std::string_view to_string(DemographicMode mode) {
  return mode == DemographicMode::kMarginal ? "marginal" : "joint";
}

DemographicMode demographic_mode_from_string(std::string_view name) {
  if (name == "joint") return DemographicMode::kJoint;
  if (name == "marginal") return DemographicMode::kMarginal;
  throw ValidationError("unknown demographic mode '" + std::string(name) +
                        "' (expected joint or marginal)");
}

std::string read_text(const fs::path& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) {
    throw ValidationError("file not found: " + path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading " + path.string());
  return buf.str();
}

void write_text(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("error writing " + path.string());
}

nlohmann::json parse_json(const std::string& text, const std::string& what) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(what + " is not valid JSON: " + e.what());
  }
}

template <typename T>
T field(const nlohmann::json& doc, const char* key, const std::string& where) {
  try {
    return doc.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": field '" + key + "' is missing or has the wrong type");
  }
}

void reject_unknown(const nlohmann::json& doc, std::initializer_list<std::string_view> known,
                    const std::string& where) {
  if (!doc.is_object()) throw ValidationError(where + " must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ValidationError(where + ": unknown field '" + key + "'");
    }
  }
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Runs a command body and maps the error taxonomy to exit codes.
template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

ojson stage_to_json(const StageSummary& s, const ObjectiveConfig& config) {
  ojson j;
  j["stage"] = s.stage;
  j["blocks"] = s.blocks;
  j["eligible_pool"] = s.eligible_pool;
  j["background"] = s.background;
  j["target_size"] = s.target_size;
  j["tolerance"] = s.tolerance;
  j["best_score"] = s.best_score;
  j["best_restart"] = s.best_restart;
  auto& terms = j["term_values"] = ojson::array();
  for (std::size_t t = 0; t < s.term_values.size(); ++t) {
    terms.push_back({{"kind", to_string(config.terms[t].kind)}, {"value", s.term_values[t]}});
  }
  auto& restarts = j["restarts"] = ojson::array();
  for (const auto& r : s.restarts) {
    restarts.push_back({{"initial_score", r.initial_score},
                        {"final_score", r.final_score},
                        {"passes", r.passes},
                        {"accepted_moves", r.accepted_moves},
                        {"converged", r.converged}});
  }
  return j;
}

}  // namespace

ojson objective_config_to_json(const ObjectiveConfig& config) {
  ojson j;
  j["block_kind"] = to_string(config.constraints.block_kind);
  auto& terms = j["terms"] = ojson::array();
  for (const auto& t : config.terms) {
    ojson term;
    term["kind"] = to_string(t.kind);
    term["direction"] = to_string(t.direction);
    term["weight"] = t.weight;
    term["parameters"] = ojson::object();
    for (const auto& [k, v] : t.parameters) term["parameters"][k] = v;
    terms.push_back(std::move(term));
  }
  ojson constraints;
  constraints["size_tolerance"] = config.constraints.size_tolerance
                                      ? ojson(*config.constraints.size_tolerance)
                                      : ojson(nullptr);
  constraints["require_full_transcript_coverage"] =
      config.constraints.require_full_transcript_coverage;
  constraints["require_full_speaker_coverage"] = config.constraints.require_full_speaker_coverage;
  j["constraints"] = std::move(constraints);
  j["normalize"] = config.normalize;
  j["smoothing"] = config.smoothing;
  j["demographic_mode"] = to_string(config.demographic_mode);
  return j;
}

ObjectiveConfig objective_config_from_json(const nlohmann::json& doc) {
  const std::string where = "stage config";
  reject_unknown(doc, {"block_kind", "terms", "constraints", "normalize", "smoothing",
                       "demographic_mode"},
                 where);
  ObjectiveConfig config;
  config.constraints.block_kind =
      block_kind_from_string(field<std::string>(doc, "block_kind", where));
  if (!doc.contains("terms") || !doc.at("terms").is_array()) {
    throw ValidationError(where + ": 'terms' must be an array");
  }
  for (const auto& t : doc.at("terms")) {
    reject_unknown(t, {"kind", "direction", "weight", "parameters"}, "term");
    UtilityTerm term;
    term.kind = term_kind_from_string(field<std::string>(t, "kind", "term"));
    term.direction = direction_from_string(field<std::string>(t, "direction", "term"));
    if (t.contains("weight")) term.weight = field<double>(t, "weight", "term");
    if (t.contains("parameters")) {
      term.parameters = field<std::map<std::string, double>>(t, "parameters", "term");
    }
    config.terms.push_back(std::move(term));
  }
  if (doc.contains("constraints")) {
    const auto& c = doc.at("constraints");
    reject_unknown(c,
                   {"size_tolerance", "require_full_transcript_coverage",
                    "require_full_speaker_coverage"},
                   "constraints");
    if (c.contains("size_tolerance") && !c.at("size_tolerance").is_null()) {
      const auto& tol = c.at("size_tolerance");
      if (!tol.is_number_unsigned()) {
        throw ValidationError("constraints: size_tolerance must be a non-negative integer");
      }
      config.constraints.size_tolerance = tol.get<std::size_t>();
    }
    if (c.contains("require_full_transcript_coverage")) {
      config.constraints.require_full_transcript_coverage =
          field<bool>(c, "require_full_transcript_coverage", "constraints");
    }
    if (c.contains("require_full_speaker_coverage")) {
      config.constraints.require_full_speaker_coverage =
          field<bool>(c, "require_full_speaker_coverage", "constraints");
    }
  }
  if (doc.contains("normalize")) config.normalize = field<bool>(doc, "normalize", where);
  if (doc.contains("smoothing")) {
    config.smoothing = field<double>(doc, "smoothing", where);
    if (!(config.smoothing > 0.0) || !std::isfinite(config.smoothing)) {
      throw ValidationError(where + ": smoothing must be positive");
    }
  }
  if (doc.contains("demographic_mode")) {
    config.demographic_mode =
        demographic_mode_from_string(field<std::string>(doc, "demographic_mode", where));
  }
  return config;
}

ojson config_to_json(const RunConfig& config) {
  ojson j;
  j["dataset"] = {{"manifest", config.manifest.generic_string()},
                  {"speakers", config.speakers.generic_string()}};
  j["preset"] = config.preset.name;
  j["ratios"] = format_ratios(config.preset.ratios);
  j["allow_shared_test_transcripts"] = config.preset.allow_shared_test_transcripts;
  ojson stages;
  stages["speaker"] = config.preset.speaker_stage
                          ? objective_config_to_json(*config.preset.speaker_stage)
                          : ojson(nullptr);
  stages["utterance"] = config.preset.utterance_stage
                            ? objective_config_to_json(*config.preset.utterance_stage)
                            : ojson(nullptr);
  j["stages"] = std::move(stages);
  j["seed"] = config.seed;
  j["restarts"] = config.restarts;
  j["max_passes"] = config.max_passes;
  j["move_rule"] = to_string(config.rule);
  j["debug_check"] = config.debug_check;
  j["out"] = config.out.generic_string();
  j["threads"] = config.threads;
  j["verbose"] = config.verbose;
  return j;
}

RunConfig config_from_json(const nlohmann::json& doc, RunConfig base) {
  const std::string where = "config";
  reject_unknown(doc,
                 {"dataset", "preset", "ratios", "allow_shared_test_transcripts", "stages",
                  "seed", "restarts", "max_passes", "move_rule", "debug_check", "out",
                  "threads", "verbose"},
                 where);
  RunConfig c = std::move(base);
  if (doc.contains("dataset")) {
    const auto& d = doc.at("dataset");
    reject_unknown(d, {"manifest", "speakers"}, "dataset");
    if (d.contains("manifest")) c.manifest = field<std::string>(d, "manifest", "dataset");
    if (d.contains("speakers")) c.speakers = field<std::string>(d, "speakers", "dataset");
  }
  if (doc.contains("preset")) c.preset = make_preset(field<std::string>(doc, "preset", where));
  if (doc.contains("ratios")) c.preset.ratios = parse_ratios(field<std::string>(doc, "ratios", where));
  if (doc.contains("allow_shared_test_transcripts")) {
    c.preset.allow_shared_test_transcripts =
        field<bool>(doc, "allow_shared_test_transcripts", where);
  }
  if (doc.contains("stages")) {
    const auto& s = doc.at("stages");
    reject_unknown(s, {"speaker", "utterance"}, "stages");
    auto stage = [&](const char* key) -> std::optional<ObjectiveConfig> {
      if (!s.contains(key) || s.at(key).is_null()) return std::nullopt;
      return objective_config_from_json(s.at(key));
    };
    c.preset.speaker_stage = stage("speaker");
    c.preset.utterance_stage = stage("utterance");
    if (c.preset.speaker_stage &&
        c.preset.speaker_stage->constraints.block_kind != BlockKind::kSpeaker) {
      throw ValidationError("stages.speaker must use speaker blocks");
    }
    if (c.preset.utterance_stage &&
        c.preset.utterance_stage->constraints.block_kind != BlockKind::kTranscript) {
      throw ValidationError("stages.utterance must use transcript blocks");
    }
  }
  auto count = [&](const char* key, std::size_t& into) {
    if (!doc.contains(key)) return;
    const auto& v = doc.at(key);
    if (!v.is_number_unsigned()) {
      throw ValidationError(where + ": " + key + " must be a non-negative integer");
    }
    into = v.get<std::size_t>();
  };
  if (doc.contains("seed")) {
    if (!doc.at("seed").is_number_unsigned()) {
      throw ValidationError("config: seed must be a non-negative integer");
    }
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  count("restarts", c.restarts);
  count("max_passes", c.max_passes);
  if (doc.contains("move_rule")) c.rule = move_rule_from_string(field<std::string>(doc, "move_rule", where));
  if (doc.contains("debug_check")) c.debug_check = field<bool>(doc, "debug_check", where);
  if (doc.contains("out")) c.out = field<std::string>(doc, "out", where);
  if (doc.contains("threads")) {
    c.threads = field<int>(doc, "threads", where);
    if (c.threads < 0) throw ValidationError("config: threads must be non-negative");
  }
  if (doc.contains("verbose")) c.verbose = field<bool>(doc, "verbose", where);
  if (c.restarts == 0) throw ValidationError("config: restarts must be positive");
  return c;
}

std::string config_digest(const RunConfig& config, const Dataset& dataset) {
  auto canonical = config_to_json(config);
  for (const char* key : {"dataset", "out", "threads", "verbose"}) canonical.erase(key);
  std::uint64_t h = fnv1a(canonical.dump());
  h = fnv1a("\n", h);
  h = fnv1a(write_manifest(dataset), h);
  h = fnv1a(write_metadata(dataset), h);
  return fmt::format("{:016x}", h);
}

Dataset load_dataset(const fs::path& manifest, const fs::path& speakers,
                     std::vector<std::string>* warnings) {
  if (manifest.empty()) throw ValidationError("no manifest given (--manifest)");
  if (speakers.empty()) throw ValidationError("no speaker metadata given (--speakers)");
  const auto manifest_text = read_text(manifest);
  const auto speakers_text = read_text(speakers);
  return parse_manifest(manifest_text, speakers_text, warnings);
}

SplitAssignment load_split_dir(const fs::path& dir) {
  SplitAssignment assignment;
  for (const auto p : kPartitions) {
    const auto path = dir / (std::string(to_string(p)) + ".csv");
    try {
      read_split_file(read_text(path), assignment);
    } catch (const ValidationError& e) {
      const std::string what = e.what();
      if (what.rfind("file not found", 0) == 0) throw;
      throw ValidationError(path.string() + ": " + what);
    }
  }
  return assignment;
}

int cmd_split(const RunConfig& config, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<std::string> warnings;
    const auto dataset = load_dataset(config.manifest, config.speakers, &warnings);
    for (const auto& w : warnings) err << "warning: " << w << '\n';
    for (const auto* stage : {&config.preset.speaker_stage, &config.preset.utterance_stage}) {
      if (*stage) validate(**stage, dataset);
    }
    if (config.threads > 0) omp_set_num_threads(config.threads);

    PipelineOptions options;
    options.seed = config.seed;
    options.restarts = config.restarts;
    options.max_passes = config.max_passes;
    options.rule = config.rule;
    options.debug_check = config.debug_check;
    options.config_digest = config_digest(config, dataset);
    std::string trace;
    if (config.verbose) {
      options.trace_sink = [&](std::string_view stage, const std::string& lines) {
        std::istringstream in(lines);
        for (std::string line; std::getline(in, line);) {
          trace += "{\"stage\":\"" + std::string(stage) + "\"," + line.substr(1) + "\n";
        }
      };
    }

    const auto result = run_pipeline(dataset, config.preset, options);

    const auto& root = config.out;
    for (const auto p : kPartitions) {
      write_text(root / "splits" / (std::string(to_string(p)) + ".csv"),
                 write_split_file(result.assignment, p));
    }
    const auto table = render_table(result.report);
    write_text(root / "report.json", report_to_json(result.report).dump(2) + "\n");
    write_text(root / "report.txt", table);
    write_text(root / "config.json", config_to_json(config).dump(2) + "\n");
    ojson stages = ojson::array();
    for (const auto& s : result.stages) {
      const auto& stage_config = s.stage == "speaker stage" ? *config.preset.speaker_stage
                                                            : *config.preset.utterance_stage;
      stages.push_back(stage_to_json(s, stage_config));
    }
    write_text(root / "stages.json", stages.dump(2) + "\n");
    if (config.verbose) {
      write_text(root / "trace.jsonl", trace);
      for (const auto& s : result.stages) {
        err << fmt::format("{}: {} blocks, target {} (+/-{}), best score {:.6f} from restart {}\n",
                           s.stage, s.blocks, s.target_size, s.tolerance, s.best_score,
                           s.best_restart);
      }
    }
    out << table;
    return kExitOk;
  });
}

int cmd_audit(const fs::path& manifest, const fs::path& speakers, const fs::path& splits,
              const std::optional<fs::path>& out_dir, bool json, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto dataset = load_dataset(manifest, speakers);
    const auto assignment = load_split_dir(splits);
    const auto report = audit(dataset, assignment);
    const auto report_json = report_to_json(report).dump(2) + "\n";
    const auto table = render_table(report);
    if (out_dir) {
      write_text(*out_dir / "report.json", report_json);
      write_text(*out_dir / "report.txt", table);
    }
    out << (json ? report_json : table);
    return kExitOk;
  });
}

int cmd_compare(const fs::path& manifest, const fs::path& speakers,
                const std::vector<fs::path>& splits, std::vector<std::string> names,
                std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (splits.size() < 2) throw ValidationError("compare needs at least two split directories");
    if (!names.empty() && names.size() != splits.size()) {
      throw ValidationError("give one --name per --splits directory or none");
    }
    if (names.empty()) {
      for (const auto& dir : splits) names.push_back(dir.generic_string());
    }
    const auto dataset = load_dataset(manifest, speakers);
    std::vector<SplitReport> reports;
    for (const auto& dir : splits) reports.push_back(audit(dataset, load_split_dir(dir)));
    out << render_comparison(names, reports);
    return kExitOk;
  });
}

int cmd_synth(const SynthSpec& spec, const fs::path& out_dir, std::ostream& out,
              std::ostream& err) {
  return guarded(err, [&] {
    const auto files = generate(spec);
    write_text(out_dir / "manifest.csv", files.manifest);
    write_text(out_dir / "speakers.csv", files.metadata);
    write_text(out_dir / "synth.json", synth_spec_to_json(spec).dump(2) + "\n");
    out << "wrote " << (out_dir / "manifest.csv").generic_string() << " and "
        << (out_dir / "speakers.csv").generic_string() << '\n';
    return kExitOk;
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimized train/valid/test splits for spoken language understanding datasets"};
  app.name(args.empty() ? "splitforge" : fs::path(args[0]).filename().string());
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // split
  auto* split = app.add_subcommand("split", "Construct an optimized split");
  std::string config_path, manifest, speakers, preset, ratios, out_dir, move_rule;
  std::uint64_t seed = 0;
  std::size_t restarts = 0, max_passes = 0;
  int threads = 0;
  bool verbose = false, emit = false, debug_check = false;
  split->add_option("--config", config_path, "JSON run config");
  auto* o_manifest = split->add_option("--manifest", manifest, "Utterance manifest CSV");
  auto* o_speakers = split->add_option("--speakers", speakers, "Speaker metadata CSV");
  auto* o_preset = split->add_option("--preset", preset, "unseen, challenge, snips or random")
                       ->check(CLI::IsMember({"unseen", "challenge", "snips", "random"}));
  auto* o_seed = split->add_option("--seed", seed, "Root seed (default: $SPLITFORGE_SEED or 0)");
  auto* o_restarts = split->add_option("--restarts", restarts, "Ascent restarts per stage")
                         ->check(CLI::PositiveNumber);
  auto* o_passes = split->add_option("--max-passes", max_passes, "Pass cap per restart");
  auto* o_ratios = split->add_option("--ratios", ratios, "train:valid:test_speaker:test_utterance");
  auto* o_out = split->add_option("--out", out_dir, "Output directory");
  auto* o_threads = split->add_option("--threads", threads, "Thread cap (0: all cores)")
                        ->check(CLI::NonNegativeNumber);
  auto* o_rule = split->add_option("--move-rule", move_rule, "first_improvement or best_improvement");
  auto* o_verbose = split->add_flag("--verbose,-v", verbose, "Stage summaries and trace.jsonl");
  auto* o_debug = split->add_flag("--debug-check", debug_check,
                                  "Re-evaluate from scratch after every accepted move");
  split->add_flag("--emit-config", emit, "Print the fully resolved config and exit");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "Audit an existing split");
  std::string a_manifest, a_speakers, a_splits, a_out;
  bool a_json = false;
  audit_cmd->add_option("--manifest", a_manifest, "Utterance manifest CSV")->required();
  audit_cmd->add_option("--speakers", a_speakers, "Speaker metadata CSV")->required();
  audit_cmd->add_option("--splits", a_splits, "Directory with the four split files")->required();
  auto* o_aout = audit_cmd->add_option("--out", a_out, "Write report.json and report.txt here");
  audit_cmd->add_flag("--json", a_json, "Print the JSON report instead of the table");

  // compare
  auto* compare = app.add_subcommand("compare", "Audit several splits side by side");
  std::string c_manifest, c_speakers;
  std::vector<std::string> c_splits, c_names;
  compare->add_option("--manifest", c_manifest, "Utterance manifest CSV")->required();
  compare->add_option("--speakers", c_speakers, "Speaker metadata CSV")->required();
  compare->add_option("--splits", c_splits, "Split directories, in column order")->required();
  compare->add_option("--name", c_names, "Column names");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  std::string s_spec, s_out;
  std::uint64_t s_seed = 0;
  bool s_emit = false;
  synth->add_option("--spec", s_spec, "JSON synth spec (default: built-in)");
  auto* o_sseed = synth->add_option("--seed", s_seed, "Generator seed");
  auto* o_sout = synth->add_option("--out", s_out, "Output directory");
  synth->add_flag("--emit-config", s_emit, "Print the resolved spec and exit");

  try {
    std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
    std::reverse(rest.begin(), rest.end());
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*split) {
    RunConfig config;
    const int status = guarded(err, [&] {
      if (!config_path.empty()) {
        config = config_from_json(parse_json(read_text(config_path), config_path));
      }
      const bool seed_in_config =
          !config_path.empty() && parse_json(read_text(config_path), config_path).contains("seed");
      if (*o_manifest) config.manifest = manifest;
      if (*o_speakers) config.speakers = speakers;
      if (*o_preset) config.preset = make_preset(preset);
      if (*o_ratios) config.preset.ratios = parse_ratios(ratios);
      if (*o_seed) {
        config.seed = seed;
      } else if (!seed_in_config) {
        if (const char* env = std::getenv("SPLITFORGE_SEED"); env != nullptr && *env != '\0') {
          std::size_t used = 0;
          unsigned long long v = 0;
          try {
            v = std::stoull(env, &used);
          } catch (const std::exception&) {
            used = 0;
          }
          if (used != std::string_view(env).size() || env[0] == '-') {
            throw ValidationError("SPLITFORGE_SEED must be a non-negative integer");
          }
          config.seed = v;
        }
      }
      if (*o_restarts) config.restarts = restarts;
      if (*o_passes) config.max_passes = max_passes;
      if (*o_out) config.out = out_dir;
      if (*o_threads) config.threads = threads;
      if (*o_rule) config.rule = move_rule_from_string(move_rule);
      if (*o_verbose) config.verbose = true;
      if (*o_debug) config.debug_check = true;
      return kExitOk;
    });
    if (status != kExitOk) return status;
    if (emit) {
      out << config_to_json(config).dump(2) << '\n';
      return kExitOk;
    }
    return cmd_split(config, out, err);
  }
  if (*audit_cmd) {
    std::optional<fs::path> dir;
    if (*o_aout) dir = a_out;
    return cmd_audit(a_manifest, a_speakers, a_splits, dir, a_json, out, err);
  }
  if (*compare) {
    std::vector<fs::path> dirs(c_splits.begin(), c_splits.end());
    return cmd_compare(c_manifest, c_speakers, dirs, c_names, out, err);
  }
  if (*synth) {
    SynthSpec spec = default_synth_spec();
    const int status = guarded(err, [&] {
      if (!s_spec.empty()) spec = synth_spec_from_json(parse_json(read_text(s_spec), s_spec));
      if (*o_sseed) spec.seed = s_seed;
      return kExitOk;
    });
    if (status != kExitOk) return status;
    if (s_emit) {
      out << synth_spec_to_json(spec).dump(2) << '\n';
      return kExitOk;
    }
    if (!*o_sout) {
      err << "error: synth needs --out\n";
      return kExitValidation;
    }
    return cmd_synth(spec, s_out, out, err);
  }
  return kExitValidation;
}

}  // namespace splitforge
