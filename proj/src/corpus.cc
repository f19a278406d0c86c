// src/corpus.cc

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

#include "urgentkit/corpus.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "urgentkit/manifest.h"
#include "urgentkit/resample.h"
#include "urgentkit/rng.h"
#include "urgentkit/stft.h"
#include "urgentkit/wav.h"

namespace urgentkit {

namespace {

constexpr int kBandwidthFft = 4096;
constexpr double kBandwidthDropDb = 50.0;
constexpr int kBandwidthRunBins = 3;

constexpr double kVadFrameS = 0.030;
constexpr double kVadHopS = 0.010;
constexpr double kVadRelDb = 30.0;
constexpr double kVadAbsDbfs = -60.0;

double percentile(std::vector<double> sorted_values, double p) {
  const size_t n = sorted_values.size();
  if (n == 1) return sorted_values[0];
  const double idx = p * static_cast<double>(n - 1);
  const size_t lo = static_cast<size_t>(idx);
  const size_t hi = std::min(lo + 1, n - 1);
  const double frac = idx - static_cast<double>(lo);
  return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

}  // namespace

double effective_bandwidth(const AudioSignal &signal) {
  check_signal(signal, "effective_bandwidth");
  if (signal.duration_s() < 0.5)
    throw Error(ErrorCode::kTooShort,
                "effective_bandwidth: need >= 0.5 s of audio");
  const std::vector<double> psd = welch_psd(signal, kBandwidthFft);
  double peak = 0.0;
  size_t peak_bin = 0;
  for (size_t k = 0; k < psd.size(); ++k) {
    if (psd[k] > peak) {
      peak = psd[k];
      peak_bin = k;
    }
  }
  const double threshold = peak * std::pow(10.0, -kBandwidthDropDb / 10.0);
  const double bin_hz =
      static_cast<double>(signal.rate_hz) / kBandwidthFft;
  size_t best = peak_bin;
  int run = 0;
  for (size_t k = 0; k < psd.size(); ++k) {
    run = psd[k] >= threshold ? run + 1 : 0;
    if (run >= kBandwidthRunBins) best = k;
  }
  return static_cast<double>(best) * bin_hz;
}

int lowest_covering_sf(double bandwidth_hz) {
  if (bandwidth_hz <= 0.0)
    throw Error(ErrorCode::kInvalidArgument,
                "lowest_covering_sf: non-positive bandwidth");
  for (int sf : challenge_sample_rates()) {
    if (bandwidth_hz <= 0.5 * sf * 0.98) return sf;  // 2% Nyquist guard
  }
  return 48000;
}

VadResult vad_speech_ratio(const AudioSignal &signal) {
  check_signal(signal, "vad_speech_ratio");
  const size_t frame = std::max<size_t>(
      1, static_cast<size_t>(std::nearbyint(kVadFrameS * signal.rate_hz)));
  const size_t hop = std::max<size_t>(
      1, static_cast<size_t>(std::nearbyint(kVadHopS * signal.rate_hz)));
  const auto &x = signal.samples;
  const size_t n_frames =
      x.size() >= frame ? (x.size() - frame) / hop + 1 : 1;

  std::vector<double> energy_db(n_frames);
  for (size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    size_t count = 0;
    for (size_t i = f * hop; i < std::min(f * hop + frame, x.size()); ++i) {
      acc += x[i] * x[i];
      ++count;
    }
    energy_db[f] = 10.0 * std::log10(acc / static_cast<double>(count));
  }

  std::vector<double> sorted = energy_db;
  std::sort(sorted.begin(), sorted.end());
  const double p95 = percentile(std::move(sorted), 0.95);
  const double threshold = p95 - kVadRelDb;

  size_t active = 0;
  for (double e : energy_db)
    if (e > threshold && e > kVadAbsDbfs) ++active;

  VadResult result;
  result.ratio = static_cast<double>(active) / static_cast<double>(n_frames);
  result.active_s = static_cast<double>(active) * kVadHopS;
  return result;
}

std::pair<std::vector<UtteranceRecord>, FilterReport> filter_corpus(
    const std::vector<UtteranceRecord> &records, const FilterRules &rules) {
  FilterReport report;
  report.input = records.size();
  std::vector<UtteranceRecord> kept;
  for (const auto &record : records) {
    const AudioSignal signal = read_wav(record.path);
    const VadResult vad = vad_speech_ratio(signal);
    if (vad.ratio < rules.min_speech_ratio ||
        vad.active_s < rules.min_active_s) {
      ++report.dropped_by_vad;
      continue;
    }
    if (rules.score_filter_enabled()) {
      auto it = record.external_scores.find(rules.score_metric);
      if (it == record.external_scores.end())
        throw Error(ErrorCode::kMissingScore,
                    "filter_corpus: utterance '" + record.utterance_id +
                        "' lacks score '" + rules.score_metric + "'");
      if (it->second < rules.score_min) {
        ++report.dropped_by_score;
        continue;
      }
    }
    ++report.kept;
    ++report.kept_per_corpus[record.corpus];
    ++report.kept_per_language[record.language];
    kept.push_back(record);
  }
  return {std::move(kept), std::move(report)};
}

std::vector<UtteranceRecord> cap_duration(
    const std::vector<UtteranceRecord> &records,
    const std::map<std::string, double> &budgets_hours, uint64_t seed) {
  for (const auto &[corpus, hours] : budgets_hours)
    if (hours < 0.0)
      throw Error(ErrorCode::kInvalidArgument,
                  "cap_duration: negative budget for corpus " + corpus);

  // Decide which records to keep per budgeted corpus; emit in input order.
  std::set<size_t> dropped;
  for (const auto &[corpus, hours] : budgets_hours) {
    const double budget_s = hours * 3600.0;

    // Stratify by language so the capped subset keeps the language mix.
    std::map<std::string, std::vector<size_t>> by_language;
    std::map<std::string, double> language_s;
    double total_s = 0.0;
    for (size_t i = 0; i < records.size(); ++i) {
      if (records[i].corpus != corpus) continue;
      by_language[records[i].language].push_back(i);
      language_s[records[i].language] += records[i].duration_s;
      total_s += records[i].duration_s;
    }
    if (by_language.empty()) continue;

    for (auto &[language, idx] : by_language) {
      Rng rng(derive_seed(seed, corpus + "\x1f" + language));
      for (size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_int(i)]);
    }

    // Interleave languages by how far each lags its duration share, then
    // keep greedily until the budget would be exceeded.
    std::map<std::string, size_t> cursor;
    std::map<std::string, double> taken_s;
    double kept_s = 0.0;
    std::set<size_t> kept_here;
    for (;;) {
      std::string pick;
      double best_lag = -1.0;
      for (const auto &[language, idx] : by_language) {
        if (cursor[language] >= idx.size()) continue;
        const double share = language_s[language] / total_s;
        const double lag = share * kept_s - taken_s[language];
        if (pick.empty() || lag > best_lag) {
          pick = language;
          best_lag = lag;
        }
      }
      if (pick.empty()) break;
      const size_t i = by_language[pick][cursor[pick]++];
      if (kept_s + records[i].duration_s > budget_s) break;
      kept_s += records[i].duration_s;
      taken_s[pick] += records[i].duration_s;
      kept_here.insert(i);
    }
    for (const auto &[language, idx] : by_language)
      for (size_t i : idx)
        if (!kept_here.count(i)) dropped.insert(i);
  }

  std::vector<UtteranceRecord> out;
  out.reserve(records.size());
  for (size_t i = 0; i < records.size(); ++i)
    if (!dropped.count(i)) out.push_back(records[i]);
  return out;
}

FilterReport preprocess_corpus(const std::filesystem::path &manifest_in,
                               const std::filesystem::path &manifest_out,
                               const std::filesystem::path &out_dir,
                               const FilterRules &rules,
                               const std::map<std::string, double> &budgets,
                               uint64_t seed, int workers) {
  const std::vector<UtteranceRecord> records = read_manifest(manifest_in);
  std::filesystem::create_directories(out_dir);

  {
    std::set<std::string> ids;
    for (const auto &r : records)
      if (!ids.insert(r.utterance_id).second)
        throw Error(ErrorCode::kDuplicateEntry,
                    "preprocess: duplicate utterance_id " + r.utterance_id);
  }

  enum class Fate { kKept, kVad, kScore, kError };
  struct PerRecord {
    Fate fate = Fate::kError;
    UtteranceRecord updated;
    std::string error;
  };
  std::vector<PerRecord> results(records.size());

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long i = 0; i < static_cast<long>(records.size()); ++i) {
    PerRecord &r = results[i];
    const UtteranceRecord &record = records[i];
    try {
      const AudioSignal signal = read_wav(record.path);
      const double bandwidth = effective_bandwidth(signal);
      const int sf = lowest_covering_sf(bandwidth);
      const AudioSignal resampled =
          sf == signal.rate_hz ? signal : resample(signal, sf);

      const VadResult vad = vad_speech_ratio(resampled);
      if (vad.ratio < rules.min_speech_ratio ||
          vad.active_s < rules.min_active_s) {
        r.fate = Fate::kVad;
        continue;
      }
      if (rules.score_filter_enabled()) {
        auto it = record.external_scores.find(rules.score_metric);
        if (it == record.external_scores.end())
          throw Error(ErrorCode::kMissingScore,
                      "utterance '" + record.utterance_id + "' lacks score '" +
                          rules.score_metric + "'");
        if (it->second < rules.score_min) {
          r.fate = Fate::kScore;
          continue;
        }
      }

      const auto out_path = out_dir / (record.utterance_id + ".wav");
      write_wav(resampled, out_path, WavEncoding::kFloat32);
      r.updated = record;
      r.updated.path = out_path.string();
      r.updated.assigned_rate_hz = sf;
      r.updated.duration_s = resampled.duration_s();
      r.fate = Fate::kKept;
    } catch (const std::exception &e) {
      r.fate = Fate::kError;
      r.error = record.utterance_id + ": " + e.what();
    }
  }

  FilterReport report;
  report.input = records.size();
  std::vector<UtteranceRecord> survivors;
  for (const auto &r : results) {
    switch (r.fate) {
      case Fate::kKept: survivors.push_back(r.updated); break;
      case Fate::kVad: ++report.dropped_by_vad; break;
      case Fate::kScore: ++report.dropped_by_score; break;
      case Fate::kError:
        ++report.errors;
        report.error_log.push_back(r.error);
        break;
    }
  }

  const std::vector<UtteranceRecord> capped =
      cap_duration(survivors, budgets, seed);
  report.dropped_by_cap = survivors.size() - capped.size();

  // Remove audio written for records the cap dropped.
  {
    std::set<std::string> kept_ids;
    for (const auto &r : capped) kept_ids.insert(r.utterance_id);
    for (const auto &r : survivors) {
      if (!kept_ids.count(r.utterance_id)) {
        std::error_code ec;
        std::filesystem::remove(r.path, ec);
      }
    }
  }

  for (const auto &r : capped) {
    ++report.kept;
    ++report.kept_per_corpus[r.corpus];
    ++report.kept_per_language[r.language];
  }
  write_manifest(capped, manifest_out);
  return report;
}

}  // namespace urgentkit
