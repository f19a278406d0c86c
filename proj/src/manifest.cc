// src/manifest.cc

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

#include "urgentkit/manifest.h"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace urgentkit {

using nlohmann::json;

std::string utterance_record_to_json(const UtteranceRecord &record) {
  json j;
  j["utterance_id"] = record.utterance_id;
  j["path"] = record.path;
  j["language"] = record.language;
  j["corpus"] = record.corpus;
  j["duration_s"] = record.duration_s;
  if (record.assigned_rate_hz > 0)
    j["assigned_rate_hz"] = record.assigned_rate_hz;
  if (!record.external_scores.empty())
    j["external_scores"] = record.external_scores;
  return j.dump();
}

UtteranceRecord utterance_record_from_json(const std::string &line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParseError,
                std::string("manifest: bad JSON line: ") + e.what());
  }
  UtteranceRecord record;
  try {
    record.utterance_id = j.at("utterance_id").get<std::string>();
    record.path = j.at("path").get<std::string>();
    if (j.contains("language"))
      record.language = j["language"].get<std::string>();
    if (j.contains("corpus")) record.corpus = j["corpus"].get<std::string>();
    if (j.contains("duration_s"))
      record.duration_s = j["duration_s"].get<double>();
    if (j.contains("assigned_rate_hz"))
      record.assigned_rate_hz = j["assigned_rate_hz"].get<int>();
    if (j.contains("external_scores"))
      record.external_scores =
          j["external_scores"].get<std::map<std::string, double>>();
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParseError,
                std::string("manifest: bad record: ") + e.what());
  }
  if (record.utterance_id.empty())
    throw Error(ErrorCode::kParseError, "manifest: empty utterance_id");
  return record;
}

std::vector<UtteranceRecord> read_manifest(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "manifest: cannot read " + path.string());
  std::vector<UtteranceRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      records.push_back(utterance_record_from_json(line));
    } catch (const Error &e) {
      throw Error(e.code(), path.string() + ":" + std::to_string(line_no) +
                                ": " + e.what());
    }
  }
  return records;
}

void write_manifest(const std::vector<UtteranceRecord> &records,
                    const std::filesystem::path &path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(ErrorCode::kIoError,
                "manifest: cannot write " + path.string());
  for (const auto &record : records)
    os << utterance_record_to_json(record) << "\n";
}

std::string chain_metadata_to_json(const ChainMetadata &metadata,
                                   const std::string &resume_key) {
  json steps = json::array();
  for (const auto &s : metadata.steps) {
    json step;
    step["kind"] = step_kind_name(s.kind);
    step["seed"] = s.seed;
    step["params"] = s.params;
    step["realized"] = s.realized;
    if (!s.commands.empty()) step["commands"] = s.commands;
    if (!s.resource_id.empty()) step["resource_id"] = s.resource_id;
    steps.push_back(std::move(step));
  }
  json j;
  j["utterance_id"] = metadata.utterance_id;
  j["steps"] = std::move(steps);
  if (std::isnan(metadata.realized_snr_db))
    j["realized_snr_db"] = nullptr;
  else
    j["realized_snr_db"] = metadata.realized_snr_db;
  json gains = json::object();
  json seeds = json::object();
  json commands = json::array();
  for (const auto &s : metadata.steps) {
    seeds[step_kind_name(s.kind)] = s.seed;
    for (const auto &[key, value] : s.realized)
      if (key.find("gain") != std::string::npos)
        gains[std::string(step_kind_name(s.kind)) + "." + key] = value;
    for (const auto &c : s.commands) commands.push_back(c);
  }
  j["gains"] = std::move(gains);
  j["seeds"] = std::move(seeds);
  j["commands"] = std::move(commands);
  j["output_rate_hz"] = metadata.output_rate_hz;
  j["resume_key"] = resume_key;
  return j.dump();
}

std::pair<std::string, std::string> metadata_line_id_and_key(
    const std::string &line) {
  json j;
  try {
    j = json::parse(line);
    return {j.at("utterance_id").get<std::string>(),
            j.value("resume_key", std::string())};
  } catch (const json::exception &e) {
    throw Error(ErrorCode::kParseError,
                std::string("metadata: bad JSON line: ") + e.what());
  }
}

std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace urgentkit
