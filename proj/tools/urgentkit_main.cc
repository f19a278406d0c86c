// tools/urgentkit_main.cc

// Copyright 2025  urgentkit authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command-line entry point wiring manifests, configs, and directories into
// the four pipelines: prep, simulate, evaluate, rank (+ validate lint).
//
// All randomness flows from the config's master_seed; outputs are
// byte-identical for any worker count and across reruns.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "urgentkit/corpus.h"
#include "urgentkit/degrade.h"
#include "urgentkit/manifest.h"
#include "urgentkit/metrics.h"
#include "urgentkit/ranking.h"
#include "urgentkit/resample.h"
#include "urgentkit/rng.h"
#include "urgentkit/wav.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace urgentkit;

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int> workers;
  bool dry_run = false;
};

json load_config(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read config " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParseError,
                "config " + path + ": " + std::string(e.what()));
  }
}

// Precedence: flag > config > default.
uint64_t effective_seed(const json &config, const CommonFlags &flags) {
  if (flags.seed) return *flags.seed;
  return config.value("master_seed", uint64_t{0});
}

int effective_workers(const json &config, const CommonFlags &flags) {
  const int w = flags.workers ? *flags.workers : config.value("workers", 1);
  if (w < 1)
    throw Error(ErrorCode::kConfigError, "worker_count must be >= 1");
  return w;
}

ChainSamplerConfig sampler_from_json(const json &j, uint64_t master_seed) {
  ChainSamplerConfig config;
  config.master_seed = master_seed;
  if (j.contains("wind_prob")) config.wind_prob = j["wind_prob"];
  if (j.contains("reverb_prob")) config.reverb_prob = j["reverb_prob"];
  if (j.contains("clip_prob")) config.clip_prob = j["clip_prob"];
  if (j.contains("bandwidth_prob")) config.bandwidth_prob = j["bandwidth_prob"];
  if (j.contains("codec_prob")) config.codec_prob = j["codec_prob"];
  if (j.contains("packet_loss_prob"))
    config.packet_loss_prob = j["packet_loss_prob"];
  if (j.contains("snr_range_db")) {
    config.snr_lo_db = j["snr_range_db"].at(0);
    config.snr_hi_db = j["snr_range_db"].at(1);
  }
  if (j.contains("wind_snr_range_db")) {
    config.wind_snr_lo_db = j["wind_snr_range_db"].at(0);
    config.wind_snr_hi_db = j["wind_snr_range_db"].at(1);
  }
  if (j.contains("clip_range")) {
    config.clip_lo = j["clip_range"].at(0);
    config.clip_hi = j["clip_range"].at(1);
  }
  if (j.contains("bandwidth_choices"))
    config.bandwidth_choices = j["bandwidth_choices"].get<std::vector<int>>();
  if (j.contains("codec_choices"))
    config.codec_choices =
        j["codec_choices"].get<std::vector<std::string>>();
  if (j.contains("bitrate_choices"))
    config.bitrate_choices = j["bitrate_choices"].get<std::vector<int>>();
  if (j.contains("packet_loss")) {
    const json &pl = j["packet_loss"];
    config.loss_prob = pl.value("p_loss", config.loss_prob);
    config.recover_prob = pl.value("q_recover", config.recover_prob);
    config.packet_ms = pl.value("packet_ms", config.packet_ms);
  }
  config.validate();
  return config;
}

CodecTable codecs_from_json(const json &j) {
  CodecTable table;
  for (const auto &[id, body] : j.items()) {
    CodecTemplate tpl;
    tpl.encode = body.at("encode").get<std::string>();
    tpl.decode = body.at("decode").get<std::string>();
    tpl.extension = body.value("extension", std::string("bin"));
    table[id] = tpl;
  }
  return table;
}

FilterRules rules_from_json(const json &j) {
  FilterRules rules;
  rules.min_speech_ratio = j.value("min_speech_ratio", rules.min_speech_ratio);
  rules.min_active_s = j.value("min_active_s", rules.min_active_s);
  rules.score_metric = j.value("score_metric", std::string());
  rules.score_min = j.value("score_min", 2.5);
  return rules;
}

// Resource manifests are JSONL {"id": ..., "path": ...} lists.
struct Resource {
  std::string id;
  std::string path;
};

std::vector<Resource> read_resource_manifest(const fs::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "cannot read resource manifest " + path.string());
  std::vector<Resource> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      out.push_back({j.at("id").get<std::string>(),
                     j.at("path").get<std::string>()});
    } catch (const json::exception &e) {
      throw Error(ErrorCode::kParseError,
                  path.string() + ":" + std::to_string(line_no) + ": " +
                      e.what());
    }
  }
  return out;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

// Resume key: chain record + input file size/mtime, no audio re-read.
std::string resume_key_for(const DegradationChain &chain,
                           const fs::path &input) {
  std::string blob = chain.utterance_id;
  for (const auto &s : chain.steps) {
    blob += '|';
    blob += step_kind_name(s.kind);
    blob += ':' + std::to_string(s.seed);
    blob += ',' + std::to_string(s.snr_db);
    blob += ',' + std::to_string(s.gustiness);
    blob += ',' + std::to_string(s.clip_ratio);
    blob += ',' + std::to_string(s.bandwidth_hz);
    blob += ',' + s.codec_id + ',' + std::to_string(s.bitrate_kbps);
    blob += ',' + std::to_string(s.loss_prob);
    blob += ',' + std::to_string(s.recover_prob);
    blob += ',' + std::to_string(s.packet_ms);
  }
  std::error_code ec;
  const auto size = fs::file_size(input, ec);
  const auto mtime = fs::last_write_time(input, ec);
  blob += '|' + std::to_string(ec ? 0 : size);
  blob += '|' +
          std::to_string(mtime.time_since_epoch().count());
  return hex64(fnv1a64(blob));
}

std::string read_text_file(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

// Transcript CSVs: header utterance_id,<text column>; text may contain
// commas, so only the first comma splits.
std::map<std::string, std::string> read_transcript_csv(
    const fs::path &path, const std::string &text_column) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "cannot read transcript CSV " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw Error(ErrorCode::kParseError,
                  path.string() + ": malformed row at line " +
                      std::to_string(line_no));
    const std::string key = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (line_no == 1) {
      if (key != "utterance_id" || value != text_column)
        throw Error(ErrorCode::kParseError,
                    path.string() + ": expected header utterance_id," +
                        text_column);
      continue;
    }
    if (out.count(key))
      throw Error(ErrorCode::kDuplicateEntry,
                  path.string() + ": duplicate utterance " + key);
    out[key] = value;
  }
  return out;
}

// ---------------------------------------------------------------------------

// Merges a prep scores CSV (utterance_id,metric,value) into the records.
void merge_prep_scores(const fs::path &scores,
                       std::vector<UtteranceRecord> &records) {
  std::ifstream in(scores);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "prep: cannot read scores CSV " + scores.string());
  std::map<std::string, size_t> index;
  for (size_t i = 0; i < records.size(); ++i)
    index[records[i].utterance_id] = i;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields !=
          std::vector<std::string>{"utterance_id", "metric", "value"})
        throw Error(ErrorCode::kParseError,
                    scores.string() +
                        ": expected header utterance_id,metric,value");
      continue;
    }
    if (fields.size() != 3)
      throw Error(ErrorCode::kParseError,
                  scores.string() + ": malformed row at line " +
                      std::to_string(line_no));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size() ||
        std::isnan(value))
      throw Error(ErrorCode::kParseError,
                  scores.string() + ": bad value at line " +
                      std::to_string(line_no));
    auto it = index.find(fields[0]);
    if (it == index.end()) continue;  // scores for unknown ids are ignored
    records[it->second].external_scores[fields[1]] = value;
  }
}

void print_filter_report(const FilterReport &report) {
  const json rep = {{"input", report.input},
                    {"kept", report.kept},
                    {"dropped_by_vad", report.dropped_by_vad},
                    {"dropped_by_score", report.dropped_by_score},
                    {"dropped_by_cap", report.dropped_by_cap},
                    {"errors", report.errors},
                    {"kept_per_corpus", report.kept_per_corpus},
                    {"kept_per_language", report.kept_per_language},
                    {"error_log", report.error_log}};
  std::cout << rep.dump(2) << "\n";
}

int cmd_prep(const json &config, const CommonFlags &flags) {
  if (!config.contains("prep"))
    throw Error(ErrorCode::kConfigError, "config has no \"prep\" section");
  const json &p = config["prep"];
  const fs::path manifest_in = p.at("manifest_in").get<std::string>();
  const fs::path manifest_out = p.at("manifest_out").get<std::string>();
  const fs::path out_dir = p.at("out_dir").get<std::string>();
  const FilterRules rules = rules_from_json(p.value("rules", json::object()));
  std::map<std::string, double> budgets;
  if (p.contains("budgets_hours"))
    budgets = p["budgets_hours"].get<std::map<std::string, double>>();

  if (!fs::exists(manifest_in))
    throw Error(ErrorCode::kIoError,
                "prep: manifest does not exist: " + manifest_in.string());

  std::vector<UtteranceRecord> records = read_manifest(manifest_in);
  const bool with_scores = p.contains("scores_csv");
  if (with_scores)
    merge_prep_scores(p["scores_csv"].get<std::string>(), records);

  if (flags.dry_run) {
    std::cout << "dry-run: would preprocess " << records.size()
              << " records into " << out_dir.string() << "\n";
    for (const auto &r : records)
      std::cout << "  " << r.utterance_id << " <- " << r.path << "\n";
    return 0;
  }

  // preprocess reads a manifest, so scored records go through a temp file
  fs::path input = manifest_in;
  if (with_scores) {
    input = manifest_out.string() + ".scored.tmp";
    write_manifest(records, input);
  }
  const FilterReport report = preprocess_corpus(
      input, manifest_out, out_dir, rules, budgets,
      effective_seed(config, flags), effective_workers(config, flags));
  if (with_scores) fs::remove(input);
  print_filter_report(report);
  return report.errors == 0 ? 0 : 1;
}

int cmd_simulate(const json &config, const CommonFlags &flags) {
  if (!config.contains("simulate"))
    throw Error(ErrorCode::kConfigError, "config has no \"simulate\" section");
  const json &s = config["simulate"];
  const fs::path manifest_path = s.at("manifest").get<std::string>();
  const fs::path out_dir = s.at("out_dir").get<std::string>();
  const uint64_t master_seed = effective_seed(config, flags);
  const int workers = effective_workers(config, flags);

  const ChainSamplerConfig sampler =
      sampler_from_json(s.value("sampler", json::object()), master_seed);
  CodecTable codecs;
  if (s.contains("codecs")) codecs = codecs_from_json(s["codecs"]);
  for (const auto &id : sampler.codec_choices)
    if (!codecs.count(id))
      throw Error(ErrorCode::kConfigError,
                  "simulate: sampler offers codec '" + id +
                      "' but no template is configured");

  const std::vector<UtteranceRecord> records = read_manifest(manifest_path);
  std::vector<Resource> noises, rirs;
  if (s.contains("noise_manifest"))
    noises = read_resource_manifest(s["noise_manifest"].get<std::string>());
  if (s.contains("rir_manifest"))
    rirs = read_resource_manifest(s["rir_manifest"].get<std::string>());
  if (sampler.wind_prob < 1.0 && noises.empty())
    throw Error(ErrorCode::kConfigError,
                "simulate: additive noise possible but no noise manifest");
  if (sampler.reverb_prob > 0.0 && rirs.empty())
    throw Error(ErrorCode::kConfigError,
                "simulate: reverberation possible but no RIR manifest");

  if (flags.dry_run) {
    std::cout << "dry-run: would simulate " << records.size()
              << " utterances into " << out_dir.string() << "\n";
    for (const auto &r : records) {
      const DegradationChain chain =
          sample_chain(sampler, r.utterance_id, r.assigned_rate_hz);
      std::cout << "  " << r.utterance_id << ":";
      for (const auto &step : chain.steps)
        std::cout << " " << step_kind_name(step.kind);
      std::cout << "\n";
    }
    return 0;
  }

  const fs::path degraded_dir = out_dir / "degraded";
  const fs::path reference_dir = out_dir / "reference";
  fs::create_directories(degraded_dir);
  fs::create_directories(reference_dir);

  // Codec scratch space: URGENTKIT_TMPDIR when set, else out_dir/tmp. Both
  // are deterministic paths, so recorded commands are reproducible.
  fs::path tmp_root = out_dir / "tmp";
  if (const char *env = std::getenv("URGENTKIT_TMPDIR")) tmp_root = env;

  // Resume state from a previous run's metadata: id -> (resume_key, line).
  std::map<std::string, std::pair<std::string, std::string>> previous;
  const fs::path metadata_path = out_dir / "metadata.jsonl";
  if (fs::exists(metadata_path)) {
    std::ifstream in(metadata_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto [id, key] = metadata_line_id_and_key(line);
      previous[id] = {key, line};
    }
  }

  struct Output {
    std::string utterance_id;
    std::string metadata_line;
    bool resumed = false;
    std::string error;
  };
  std::vector<Output> outputs(records.size());

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    const UtteranceRecord &record = records[i];
    Output &out = outputs[i];
    out.utterance_id = record.utterance_id;
    try {
      const AudioSignal clean = read_wav(record.path);
      const DegradationChain chain =
          sample_chain(sampler, record.utterance_id, clean.rate_hz);
      const std::string key = resume_key_for(chain, record.path);

      const fs::path degraded_path =
          degraded_dir / (record.utterance_id + ".wav");
      const fs::path reference_path =
          reference_dir / (record.utterance_id + ".wav");

      auto prev = previous.find(record.utterance_id);
      if (prev != previous.end() && prev->second.first == key &&
          fs::exists(degraded_path) && fs::exists(reference_path)) {
        out.resumed = true;
        out.metadata_line = prev->second.second;
        continue;
      }

      // Resource picks are seeded independently of the chain draws.
      Rng resource_rng(
          derive_seed(master_seed, record.utterance_id + "\x1fresources"));
      ChainResources resources;
      AudioSignal noise, rir;
      if (!noises.empty()) {
        const Resource &pick = noises[resource_rng.uniform_int(noises.size())];
        resources.noise_id = pick.id;
        noise = read_wav(pick.path);
        if (noise.rate_hz != clean.rate_hz)
          noise = resample(noise, clean.rate_hz);
        resources.noise = &noise;
      }
      if (!rirs.empty()) {
        const Resource &pick = rirs[resource_rng.uniform_int(rirs.size())];
        resources.rir_id = pick.id;
        rir = read_wav(pick.path);
        if (rir.rate_hz != clean.rate_hz) rir = resample(rir, clean.rate_hz);
        resources.rir = &rir;
      }
      resources.codecs = &codecs;
      resources.codec_workdir = tmp_root / record.utterance_id;
      const std::string ref_mode =
          s.value("reference_mode", std::string("dry"));
      if (ref_mode == "early50") {
        resources.reverb_reference_early_ms = 50.0;
      } else if (ref_mode != "dry") {
        throw Error(ErrorCode::kConfigError,
                    "simulate: unknown reference_mode '" + ref_mode + "'");
      }

      const ApplyResult applied = apply_chain(clean, chain, resources);
      write_wav(applied.degraded, degraded_path, WavEncoding::kFloat32);
      write_wav(applied.reference, reference_path, WavEncoding::kFloat32);
      out.metadata_line = chain_metadata_to_json(applied.metadata, key);
      std::error_code ec;
      fs::remove_all(tmp_root / record.utterance_id, ec);
    } catch (const std::exception &e) {
      out.error = record.utterance_id + ": " + e.what();
    }
  }

  size_t failures = 0, resumed = 0;
  for (const auto &o : outputs) {
    if (!o.error.empty()) {
      std::cerr << "error: " << o.error << "\n";
      ++failures;
    }
    if (o.resumed) ++resumed;
  }

  // Collect metadata sorted by utterance_id; rewrite only when changed.
  std::vector<const Output *> ok;
  for (const auto &o : outputs)
    if (o.error.empty()) ok.push_back(&o);
  std::sort(ok.begin(), ok.end(), [](const Output *a, const Output *b) {
    return a->utterance_id < b->utterance_id;
  });
  std::string metadata;
  for (const Output *o : ok) metadata += o->metadata_line + "\n";
  if (read_text_file(metadata_path) != metadata) {
    std::ofstream os(metadata_path, std::ios::binary | std::ios::trunc);
    os << metadata;
  }
  std::error_code ec;
  if (fs::exists(tmp_root) && fs::is_empty(tmp_root))
    fs::remove(tmp_root, ec);

  std::cout << "simulated " << ok.size() << "/" << records.size()
            << " utterances (" << resumed << " resumed, " << failures
            << " failed)\n";
  return failures == 0 ? 0 : 1;
}

int cmd_evaluate(const json &config, const CommonFlags &flags) {
  if (!config.contains("evaluate"))
    throw Error(ErrorCode::kConfigError, "config has no \"evaluate\" section");
  const json &e = config["evaluate"];
  const int workers = effective_workers(config, flags);

  ScoreTable table;
  std::vector<UtteranceRecord> records;
  if (e.contains("manifest"))
    records = read_manifest(e["manifest"].get<std::string>());

  // Computed signal metrics.
  std::vector<MetricDescriptor> computed;
  if (e.contains("metrics")) {
    for (const auto &name : e["metrics"]) {
      const std::string metric = name.get<std::string>();
      bool found = false;
      for (const auto &d : challenge_metrics()) {
        if (d.name == metric) {
          if (d.source != MetricSource::kComputed || metric == "CAcc")
            throw Error(ErrorCode::kConfigError,
                        "evaluate: metric '" + metric +
                            "' is not a computed signal metric");
          computed.push_back(d);
          found = true;
          break;
        }
      }
      if (!found)
        throw Error(ErrorCode::kConfigError,
                    "evaluate: unknown metric '" + metric + "'");
    }
  }

  std::map<std::string, std::string> systems;
  if (e.contains("systems"))
    systems = e["systems"].get<std::map<std::string, std::string>>();

  if (!computed.empty()) {
    if (records.empty())
      throw Error(ErrorCode::kConfigError,
                  "evaluate: computed metrics need a manifest");
    if (systems.empty())
      throw Error(ErrorCode::kConfigError,
                  "evaluate: computed metrics need system directories");
    table = evaluate_manifest(e["manifest"].get<std::string>(), systems,
                              computed, workers);
  }

  // Character accuracy from transcripts.
  if (e.contains("hyp_transcripts")) {
    if (!e.contains("ref_transcripts"))
      throw Error(ErrorCode::kConfigError,
                  "evaluate: hyp_transcripts without ref_transcripts");
    const auto refs = read_transcript_csv(
        e["ref_transcripts"].get<std::string>(), "text");
    std::map<std::string, std::string> language;
    for (const auto &r : records) language[r.utterance_id] = r.language;
    for (const auto &d : challenge_metrics())
      if (d.name == "CAcc") table.add_descriptor(d);
    for (const auto &[system_id, path] :
         e["hyp_transcripts"].get<std::map<std::string, std::string>>()) {
      const auto hyps =
          read_transcript_csv(fs::path(path), "hypothesis");
      for (const auto &[utt, hyp] : hyps) {
        auto ref = refs.find(utt);
        if (ref == refs.end())
          throw Error(ErrorCode::kConfigError,
                      "evaluate: hypothesis for unknown utterance '" + utt +
                          "' (no reference transcript)");
        const std::string lang =
            language.count(utt) ? language[utt] : "unknown";
        table.add(system_id, utt, "CAcc",
                  char_accuracy(ref->second, hyp, lang));
      }
    }
  }

  // Ingested external scores.
  if (e.contains("ingest")) {
    for (const auto &[metric, path] :
         e["ingest"].get<std::map<std::string, std::string>>()) {
      MetricDescriptor descriptor{metric, Direction::kHigherBetter,
                                  MetricCategory::kNonIntrusive,
                                  MetricSource::kIngested};
      for (const auto &d : challenge_metrics())
        if (d.name == metric) descriptor = d;
      if (descriptor.source != MetricSource::kIngested)
        throw Error(ErrorCode::kConfigError,
                    "evaluate: metric '" + metric + "' cannot be ingested");
      ingest_scores(fs::path(path), descriptor, table);
    }
  }

  const std::string csv = table.to_csv();
  if (e.contains("out_csv")) {
    const fs::path out = e["out_csv"].get<std::string>();
    if (read_text_file(out) != csv) {
      std::ofstream os(out, std::ios::binary | std::ios::trunc);
      if (!os)
        throw Error(ErrorCode::kIoError, "cannot write " + out.string());
      os << csv;
    }
    std::cout << "wrote " << table.entries().size() << " scores to "
              << out.string() << "\n";
  } else {
    std::cout << csv;
  }
  return 0;
}

int cmd_rank(const json &config, bool by_language, bool from_ranks) {
  if (!config.contains("rank"))
    throw Error(ErrorCode::kConfigError, "config has no \"rank\" section");
  const json &r = config["rank"];
  const fs::path scores_csv = r.at("scores_csv").get<std::string>();
  const ScoreTable table = ScoreTable::from_csv(scores_csv);

  CategoryConfig categories =
      r.contains("category_config")
          ? CategoryConfig::from_json_file(
                r["category_config"].get<std::string>())
          : CategoryConfig::challenge_default();
  for (const auto &metric : categories.all_metrics())
    if (!table.has_descriptor(metric))
      throw Error(ErrorCode::kConfigError,
                  "rank: category config names metric '" + metric +
                      "' absent from the score table");

  std::map<std::string, std::string> utterance_language;
  if (r.contains("manifest"))
    for (const auto &record :
         read_manifest(r["manifest"].get<std::string>()))
      utterance_language[record.utterance_id] = record.language;

  Leaderboard board;
  if (from_ranks) {
    // The table already holds per-metric ranks (e.g. transcribed from a
    // published results table); run only the category and final averaging.
    const auto means = system_metric_means(table);
    std::map<std::string, std::map<std::string, double>> ranks;
    for (const auto &[key, value] : means) ranks[key.second][key.first] = value;
    const auto cat_ranks = category_mean_ranks(ranks, categories);
    const auto finals = final_scores(cat_ranks);
    board.config = categories;
    for (const auto &system : table.systems()) {
      LeaderboardRow row;
      row.system_id = system;
      for (const auto &metric : categories.all_metrics()) {
        row.metric_means[metric] = means.at({system, metric});
        row.metric_ranks[metric] = means.at({system, metric});
      }
      for (const auto &[category, metrics] : categories.categories)
        row.category_ranks[category] = cat_ranks.at({system, category});
      row.final_score = finals.at(system);
      board.rows.push_back(std::move(row));
    }
    std::sort(board.rows.begin(), board.rows.end(),
              [](const LeaderboardRow &a, const LeaderboardRow &b) {
                return a.final_score != b.final_score
                           ? a.final_score < b.final_score
                           : a.system_id < b.system_id;
              });
  } else {
    board = build_leaderboard(table, categories);
  }
  const fs::path prefix = r.value("out_prefix", std::string("leaderboard"));

  auto write_if_changed = [](const fs::path &path, const std::string &body) {
    if (read_text_file(path) != body) {
      std::ofstream os(path, std::ios::binary | std::ios::trunc);
      if (!os)
        throw Error(ErrorCode::kIoError, "cannot write " + path.string());
      os << body;
    }
  };
  write_if_changed(prefix.string() + ".csv", board.to_csv());
  write_if_changed(prefix.string() + ".txt", board.to_text());
  std::cout << board.to_text();

  if (by_language) {
    if (utterance_language.empty())
      throw Error(ErrorCode::kConfigError,
                  "rank: --by-language needs a manifest with language tags");
    std::set<std::string> langs;
    for (const auto &[utt, lang] : utterance_language) langs.insert(lang);
    for (const auto &lang : langs) {
      const auto means =
          system_metric_means(table, lang, &utterance_language);
      // per-language per-metric mean table (Table 3 style)
      std::string csv = "system_id";
      for (const auto &metric : categories.all_metrics())
        csv += "," + metric;
      csv += "\n";
      for (const auto &system : table.systems()) {
        csv += system;
        for (const auto &metric : categories.all_metrics()) {
          auto it = means.find({system, metric});
          std::ostringstream v;
          if (it != means.end()) v << std::fixed << std::setprecision(4)
                                   << it->second;
          csv += "," + v.str();
        }
        csv += "\n";
      }
      write_if_changed(prefix.string() + ".lang_" + lang + ".csv", csv);
    }
    std::cout << "wrote " << langs.size() << " per-language tables\n";
  }
  return 0;
}

int cmd_validate(const json &config) {
  std::vector<std::string> problems;
  auto check_path = [&problems](const json &section, const char *key,
                                const std::string &where) {
    if (!section.contains(key)) return;
    const std::string p = section[key].get<std::string>();
    if (!fs::exists(p))
      problems.push_back(where + "." + key + ": path does not exist: " + p);
  };

  if (config.contains("prep")) {
    check_path(config["prep"], "manifest_in", "prep");
    check_path(config["prep"], "scores_csv", "prep");
  }
  if (config.contains("simulate")) {
    const json &s = config["simulate"];
    check_path(s, "manifest", "simulate");
    check_path(s, "noise_manifest", "simulate");
    check_path(s, "rir_manifest", "simulate");
    if (s.contains("sampler")) {
      try {
        sampler_from_json(s["sampler"], 0);
      } catch (const std::exception &e) {
        problems.push_back(std::string("simulate.sampler: ") + e.what());
      }
    }
  }
  if (config.contains("evaluate")) {
    const json &e = config["evaluate"];
    check_path(e, "manifest", "evaluate");
    check_path(e, "ref_transcripts", "evaluate");
    if (e.contains("systems"))
      for (const auto &[id, dir] :
           e["systems"].get<std::map<std::string, std::string>>())
        if (!fs::exists(dir))
          problems.push_back("evaluate.systems." + id +
                             ": directory does not exist: " + dir);
  }
  if (config.contains("rank")) {
    check_path(config["rank"], "scores_csv", "rank");
    if (config["rank"].contains("category_config")) {
      const std::string p = config["rank"]["category_config"];
      if (!fs::exists(p)) {
        problems.push_back("rank.category_config: path does not exist: " + p);
      } else {
        try {
          CategoryConfig::from_json_file(p);
        } catch (const std::exception &e) {
          problems.push_back(std::string("rank.category_config: ") + e.what());
        }
      }
    }
  }

  // Manifest lint: parseable lines and unique ids.
  for (const char *section : {"prep", "simulate", "evaluate"}) {
    if (!config.contains(section)) continue;
    const char *key =
        std::string(section) == "prep" ? "manifest_in" : "manifest";
    if (!config[section].contains(key)) continue;
    const std::string p = config[section][key].get<std::string>();
    if (!fs::exists(p)) continue;
    try {
      const auto records = read_manifest(p);
      std::set<std::string> ids;
      for (const auto &r : records)
        if (!ids.insert(r.utterance_id).second)
          problems.push_back(std::string(section) + "." + key +
                             ": duplicate utterance_id " + r.utterance_id);
    } catch (const std::exception &e) {
      problems.push_back(std::string(section) + "." + key + ": " + e.what());
    }
  }

  if (problems.empty()) {
    std::cout << "config OK\n";
    return 0;
  }
  for (const auto &p : problems) std::cerr << "invalid: " << p << "\n";
  return 1;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"urgentkit: degraded-speech simulation, preprocessing, "
               "metric computation, and leaderboard ranking"};
  app.require_subcommand(1);

  CommonFlags flags;
  bool by_language = false;
  bool from_ranks = false;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", flags.config_path, "JSON run config")
        ->required();
    cmd->add_option("--seed", flags.seed, "override master_seed");
    cmd->add_option("--workers", flags.workers, "override worker count");
    cmd->add_flag("--dry-run", flags.dry_run,
                  "print planned actions, write nothing");
  };

  CLI::App *prep = app.add_subcommand("prep", "corpus preprocessing");
  add_common(prep);
  CLI::App *simulate = app.add_subcommand("simulate", "degradation pipeline");
  add_common(simulate);
  CLI::App *evaluate = app.add_subcommand("evaluate", "metric computation");
  add_common(evaluate);
  CLI::App *rank = app.add_subcommand("rank", "leaderboard aggregation");
  add_common(rank);
  rank->add_flag("--by-language", by_language,
                 "also write per-language mean tables");
  rank->add_flag("--from-ranks", from_ranks,
                 "treat table values as per-metric ranks; run only the "
                 "category and final averaging");
  CLI::App *validate = app.add_subcommand("validate", "lint config/manifests");
  add_common(validate);

  CLI11_PARSE(app, argc, argv);

  try {
    const json config = load_config(flags.config_path);
    if (prep->parsed()) return cmd_prep(config, flags);
    if (simulate->parsed()) return cmd_simulate(config, flags);
    if (evaluate->parsed()) return cmd_evaluate(config, flags);
    if (rank->parsed()) return cmd_rank(config, by_language, from_ranks);
    if (validate->parsed()) return cmd_validate(config);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
