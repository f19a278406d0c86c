// include/urgentkit/manifest.h

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

#ifndef URGENTKIT_MANIFEST_H_
#define URGENTKIT_MANIFEST_H_

#include <filesystem>
#include <string>
#include <vector>

#include "urgentkit/corpus.h"
#include "urgentkit/degrade.h"

namespace urgentkit {

// Manifests are line-delimited JSON, one UtteranceRecord per line.
std::vector<UtteranceRecord> read_manifest(const std::filesystem::path &path);
void write_manifest(const std::vector<UtteranceRecord> &records,
                    const std::filesystem::path &path);

std::string utterance_record_to_json(const UtteranceRecord &record);
UtteranceRecord utterance_record_from_json(const std::string &line);

// Per-utterance simulation metadata, one JSON object per line. resume_key
// lets a rerun skip utterances whose chain and input are unchanged.
std::string chain_metadata_to_json(const ChainMetadata &metadata,
                                   const std::string &resume_key);
/// Returns (metadata JSON restored fields we need, resume_key).
std::pair<std::string, std::string> metadata_line_id_and_key(
    const std::string &line);

/// CSV splitter for the fixed-schema score/transcript files; no quoting.
std::vector<std::string> split_csv_line(const std::string &line);

}  // namespace urgentkit

#endif  // URGENTKIT_MANIFEST_H_
