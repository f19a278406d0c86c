// include/urgentkit/corpus.h

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

#ifndef URGENTKIT_CORPUS_H_
#define URGENTKIT_CORPUS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "urgentkit/types.h"

namespace urgentkit {

struct UtteranceRecord {
  std::string utterance_id;
  std::string path;
  std::string language = "unknown";  // ISO-639-1 or "unknown"
  std::string corpus;
  double duration_s = 0.0;
  int assigned_rate_hz = 0;  // 0 = unset
  std::map<std::string, double> external_scores;
};

struct FilterRules {
  double min_speech_ratio = 0.5;
  double min_active_s = 1.0;
  std::string score_metric;  // empty = no score filtering
  double score_min = 0.0;

  bool score_filter_enabled() const { return !score_metric.empty(); }
};

struct FilterReport {
  size_t input = 0;
  size_t kept = 0;
  size_t dropped_by_vad = 0;
  size_t dropped_by_score = 0;
  size_t dropped_by_cap = 0;
  size_t errors = 0;
  std::map<std::string, size_t> kept_per_corpus;
  std::map<std::string, size_t> kept_per_language;
  std::vector<std::string> error_log;
};

/// Highest frequency at which the Welch-averaged spectrum (4096-point FFT,
/// 50% overlap, Hann) stays within 50 dB of its peak for at least three
/// consecutive bins. Requires >= 0.5 s of audio.
double effective_bandwidth(const AudioSignal &signal);

/// Smallest challenge sampling frequency whose Nyquist covers the bandwidth
/// with a 2% guard (bandwidth <= 0.49 * SF); 48000 when none qualifies.
int lowest_covering_sf(double bandwidth_hz);

struct VadResult {
  double ratio = 0.0;    // active frames / total frames
  double active_s = 0.0; // active frames * hop
};

/// Energy VAD: 30 ms frames, 10 ms hop. A frame is active iff its energy is
/// within 30 dB of the 95th-percentile frame energy and above -60 dBFS.
VadResult vad_speech_ratio(const AudioSignal &signal);

/// Drops records failing the VAD rules, then records whose ingested score
/// falls below score_min. Input order is preserved. Requesting a score
/// filter on a record lacking that score is an error naming the utterance.
std::pair<std::vector<UtteranceRecord>, FilterReport> filter_corpus(
    const std::vector<UtteranceRecord> &records, const FilterRules &rules);

/// Per-corpus duration capping: a seeded, per-language stratified shuffle is
/// kept greedily until the hour budget would be exceeded. Corpora without a
/// budget pass through untouched.
std::vector<UtteranceRecord> cap_duration(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, double> &budgets_hours, uint64_t seed);

/// Full preprocessing pipeline: bandwidth detection -> lowest covering SF ->
/// resample + rewrite audio under out_dir -> VAD/score filters -> duration
/// caps -> output manifest. Unreadable audio is skipped and logged.
FilterReport preprocess_corpus(const std::filesystem::path &manifest_in,
                               const std::filesystem::path &manifest_out,
                               const std::filesystem::path &out_dir,
                               const FilterRules &rules,
                               const std::map<std::string, double> &budgets,
                               uint64_t seed, int workers = 1);

}  // namespace urgentkit

#endif  // URGENTKIT_CORPUS_H_
