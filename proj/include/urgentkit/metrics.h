// include/urgentkit/metrics.h

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

#ifndef URGENTKIT_METRICS_H_
#define URGENTKIT_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "urgentkit/types.h"

namespace urgentkit {

enum class Direction { kHigherBetter, kLowerBetter };
enum class MetricCategory {
  kNonIntrusive,
  kIntrusive,
  kDownstreamIndependent,
  kDownstreamDependent,
  kSubjective,
};
enum class MetricSource { kComputed, kIngested };

struct MetricDescriptor {
  std::string name;
  Direction direction = Direction::kHigherBetter;
  MetricCategory category = MetricCategory::kIntrusive;
  MetricSource source = MetricSource::kComputed;
};

/// The 14 challenge metrics with their categories and directions.
/// SDR, LSD, MCD, ESTOI and CAcc are computed here; the rest are ingested.
const std::vector<MetricDescriptor> &challenge_metrics();

const char *direction_name(Direction d);
Direction direction_from_name(const std::string &name);
const char *category_name(MetricCategory c);
MetricCategory category_from_name(const std::string &name);

/// (system, utterance, metric) -> value triples with descriptor metadata.
/// At most one value per key; NaN values are rejected.
class ScoreTable {
 public:
  struct Entry {
    std::string system_id;
    std::string utterance_id;
    std::string metric;
    double value;
  };

  void add_descriptor(const MetricDescriptor &d);
  bool has_descriptor(const std::string &metric) const;
  const MetricDescriptor &descriptor(const std::string &metric) const;
  const std::vector<MetricDescriptor> &descriptors() const {
    return descriptors_;
  }

  /// Inserts one value; throws on duplicates or NaN.
  void add(const std::string &system_id, const std::string &utterance_id,
           const std::string &metric, double value);

  const std::vector<Entry> &entries() const { return entries_; }
  std::vector<std::string> systems() const;

  /// CSV "system_id,utterance_id,metric,value" sorted lexicographically.
  std::string to_csv() const;
  void write_csv(const std::filesystem::path &path) const;
  static ScoreTable from_csv(const std::filesystem::path &path);

 private:
  std::vector<Entry> entries_;
  std::map<std::string, size_t> index_;  // "sys\x1futt\x1fmetric" -> entry
  std::vector<MetricDescriptor> descriptors_;
};

// ---------------------------------------------------------------------------
// Computed metrics. All pairs are truncated to the shorter signal first and
// must share a sampling rate.

/// Energy-ratio SDR in dB: 10 log10(sum x^2 / sum (x - x_hat)^2), capped at
/// +100 dB when the error energy drops below 1e-20 of the signal energy.
double sdr(const AudioSignal &reference, const AudioSignal &estimate);

/// Log-spectral distance in dB: STFT 2048/512 Hann, power floored at 1e-10,
/// per-frame RMS over bins of 10 log10(P_ref / P_est), averaged over frames.
double lsd(const AudioSignal &reference, const AudioSignal &estimate);

/// Mel cepstral distortion in dB: 25 ms frames, 10 ms hop, 80 mel bands to
/// Nyquist, DCT-II coefficients c1..c13,
/// (10/ln 10) sqrt(2 sum (c_d - c_hat_d)^2) averaged over frames.
double mcd(const AudioSignal &reference, const AudioSignal &estimate);

/// Extended short-time objective intelligibility in [-1, 1]. Both signals
/// are resampled to 10 kHz; frames whose reference energy falls more than
/// 40 dB below the loudest frame are discarded; 512/256 Hann STFT; 15
/// one-third-octave bands from 150 Hz; 30-frame segments with row and column
/// mean/variance normalization.
double estoi(const AudioSignal &reference, const AudioSignal &estimate);

/// Levenshtein distance over token sequences (insert/delete/substitute).
int edit_distance(std::span<const uint32_t> reference,
                  std::span<const uint32_t> hypothesis);

/// 1 - character error rate after normalization (casefold, strip
/// punctuation, collapse whitespace). Spaces count as characters for
/// space-delimited languages and are dropped for zh/ja/ko/th. May go
/// negative when the hypothesis is much longer than the reference.
double char_accuracy(const std::string &reference,
                     const std::string &hypothesis,
                     const std::string &language);

/// Normalized code points as fed to edit_distance (exposed for tests).
std::vector<uint32_t> normalize_transcript(const std::string &text,
                                           const std::string &language);

// ---------------------------------------------------------------------------
// Batch drivers

/// Merges a CSV with columns exactly `system_id,utterance_id,value` into the
/// table under the descriptor's metric name. Malformed rows report their
/// line number; duplicate keys and NaN values are errors.
void ingest_scores(const std::filesystem::path &csv,
                   const MetricDescriptor &descriptor, ScoreTable &table);

/// Runs the computed metrics over every (system, utterance) pair. Each
/// system directory must hold one `<utterance_id>.wav` per manifest entry;
/// all missing files are reported in a single error. Enhanced audio is
/// resampled to the reference rate before scoring. Results are identical
/// for any worker count.
ScoreTable evaluate_manifest(
    const std::filesystem::path &manifest,
    const std::map<std::string, std::string> &system_dirs,
    const std::vector<MetricDescriptor> &metrics, int workers = 1);

}  // namespace urgentkit

#endif  // URGENTKIT_METRICS_H_
