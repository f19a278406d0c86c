// tests/acceptance.cc

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

// End-to-end acceptance checks, one pass/fail line per criterion. Exits
// nonzero when any criterion fails.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include <nlohmann/json.hpp>

#include "reference.h"
#include "test_util.h"
#include "urgentkit/corpus.h"
#include "urgentkit/degrade.h"
#include "urgentkit/manifest.h"
#include "urgentkit/metrics.h"
#include "urgentkit/ranking.h"
#include "urgentkit/rng.h"
#include "urgentkit/stft.h"
#include "urgentkit/wav.h"

using namespace urgentkit;
using namespace urgentkit::testutil;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::vector<std::string> g_notes;

void report(int criterion, const std::string &what, bool pass) {
  std::printf("%s  criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              what.c_str());
  if (!pass) ++g_failures;
}

struct Check {
  bool ok = true;
  std::string detail;
  void expect(bool cond, const std::string &msg) {
    if (!cond && ok) detail = msg;
    ok = ok && cond;
  }
};

std::string slurp(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

uint64_t tree_hash(const fs::path &root) {
  std::vector<std::string> entries;
  for (const auto &p : fs::recursive_directory_iterator(root)) {
    if (!p.is_regular_file()) continue;
    entries.push_back(fs::relative(p.path(), root).string() + ":" +
                      std::to_string(fnv1a64(slurp(p.path()))));
  }
  std::sort(entries.begin(), entries.end());
  std::string blob;
  for (const auto &e : entries) blob += e + "\n";
  return fnv1a64(blob);
}

// ---------------------------------------------------------------------------
// 1. Leaderboard reproduction from the published per-metric ranks.

bool criterion1() {
  const auto start = std::chrono::steady_clock::now();
  Check c;

  const std::vector<std::string> metrics = {
      "DNSMOS", "NISQA", "UTMOS",                            // non-intrusive
      "POLQA",  "PESQ",  "ESTOI", "SDR", "MCD", "LSD",       // intrusive
      "SBS",    "LPS",                                       // downstream-ind
      "SpkSim", "CAcc",                                      // downstream-dep
      "MOS"};                                                // subjective
  const CategoryConfig config = CategoryConfig::challenge_default();

  const std::map<std::string, std::vector<double>> rank_fixture = {
      {"T1", {8, 6, 5, 1, 1, 1, 1, 2, 3, 1, 1, 1, 1, 5}},
      {"T2", {5, 5, 3, 4, 4, 5, 5, 7, 8, 4, 5, 3, 6, 3}},
      {"T3", {4, 4, 2, 5, 6, 4, 4, 11, 12, 6, 3, 6, 5, 2}},
      {"T13", {1, 1, 1, 21, 21, 22, 22, 22, 22, 17, 18, 22, 21, 1}},
      {"T10", {10, 14, 16, 9, 10, 8, 9, 3, 1, 9, 8, 8, 7, 12}},
  };
  const std::map<std::string, double> published = {
      {"T1", 2.97}, {"T2", 4.37}, {"T3", 4.47}, {"T13", 12.53}};

  std::map<std::string, std::map<std::string, double>> ranks;
  for (size_t m = 0; m < metrics.size(); ++m)
    for (const auto &[system, row] : rank_fixture)
      ranks[metrics[m]][system] = row[m];

  const auto cat_ranks = category_mean_ranks(ranks, config);
  const auto finals = final_scores(cat_ranks);

  for (const auto &[system, expect] : published) {
    const double got = finals.at(system);
    c.expect(std::fabs(got - expect) <= 0.01,
             system + ": got " + std::to_string(got) + " want " +
                 std::to_string(expect));
  }
  // The baseline row prints 9.63 but its displayed ranks average to 9.60;
  // asserted within the documented 0.05 slack.
  c.expect(std::fabs(finals.at("T10") - 9.63) <= 0.05,
           "T10: got " + std::to_string(finals.at("T10")));

  const double elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  c.expect(elapsed_s < 1.0, "took " + std::to_string(elapsed_s) + " s");
  if (!c.ok) g_notes.push_back("criterion 1: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 2. Metric identity suite on random signals.

bool criterion2() {
  Check c;
  for (int i = 0; i < 20; ++i) {
    AudioSignal x = synth_speech(16000, 1.5, 500 + i);
    c.expect(sdr(x, x) == 100.0, "SDR(x,x) cap");
    c.expect(std::fabs(lsd(x, x)) <= 1e-9, "LSD(x,x)");
    c.expect(std::fabs(mcd(x, x)) <= 1e-9, "MCD(x,x)");
    c.expect(std::fabs(estoi(x, x) - 1.0) <= 1e-6, "ESTOI(x,x)");

    AudioSignal half = x;
    for (double &v : half.samples) v *= 0.5;
    c.expect(std::fabs(sdr(x, half) - 6.02) <= 0.01, "SDR(x, 0.5x)");

    AudioSignal ten = x;
    for (double &v : ten.samples) v *= 10.0;
    c.expect(std::fabs(lsd(x, ten) - 20.0) <= 1e-3, "LSD(x, 10x)");
  }
  if (!c.ok) g_notes.push_back("criterion 2: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 3. Oracle equivalence.

bool criterion3() {
  Check c;

  {  // edit distance vs exhaustive recursion on 1000 short pairs
    Rng rng(600);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<uint32_t> a(rng.uniform_int(9)), b(rng.uniform_int(9));
      for (auto &v : a) v = 'a' + static_cast<uint32_t>(rng.uniform_int(4));
      for (auto &v : b) v = 'a' + static_cast<uint32_t>(rng.uniform_int(4));
      if (edit_distance(a, b) != reference::edit_distance_recursive(a, b)) {
        c.expect(false, "edit_distance mismatch at trial " +
                            std::to_string(trial));
        break;
      }
    }
  }

  for (int i = 0; i < 10; ++i) {  // LSD and MCD vs naive double loops
    const AudioSignal a = white_noise(16000, 0.45, 610 + i);
    const AudioSignal b = synth_speech(16000, 0.45, 620 + i);
    c.expect(std::fabs(lsd(a, b) - reference::lsd_naive(a, b)) <= 1e-6,
             "LSD oracle pair " + std::to_string(i));
    c.expect(std::fabs(mcd(a, b) - reference::mcd_naive(a, b)) <= 1e-6,
             "MCD oracle pair " + std::to_string(i));
  }

  {  // convolution vs direct O(N*K)
    const AudioSignal speech = synth_speech(16000, 0.6, 630);
    Rng rng(631);
    AudioSignal rir;
    rir.rate_hz = 16000;
    rir.samples.assign(513, 0.0);
    rir.samples[0] = 1.0;
    for (size_t i = 1; i < rir.samples.size(); ++i)
      rir.samples[i] =
          0.4 * rng.normal() * std::exp(-static_cast<double>(i) / 100.0);
    const ReverbResult fast = convolve_rir(speech, rir);
    const auto slow =
        reference::direct_convolve(speech.samples, rir.samples);
    // re-derive the direct-path alignment and peak rescue independently
    size_t shift = 0;
    for (size_t i = 0; i < rir.samples.size(); ++i)
      if (std::fabs(rir.samples[i]) > std::fabs(rir.samples[shift]))
        shift = i;
    std::vector<double> expect(speech.size());
    double peak = 0.0;
    for (size_t i = 0; i < speech.size(); ++i) {
      expect[i] = i + shift < slow.size() ? slow[i + shift] : 0.0;
      peak = std::max(peak, std::fabs(expect[i]));
    }
    if (peak > 1.0)
      for (double &v : expect) v *= 0.99 / peak;
    for (size_t i = 0; i < speech.size(); ++i) {
      if (std::fabs(fast.reverberant.samples[i] - expect[i]) > 1e-9) {
        c.expect(false, "convolution mismatch at " + std::to_string(i));
        break;
      }
    }
  }
  if (!c.ok) g_notes.push_back("criterion 3: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 4. Degradation invariants.

bool criterion4() {
  Check c;

  const AudioSignal speech = synth_speech(16000, 2.0, 640);
  const AudioSignal noise = white_noise(16000, 2.0, 641);
  for (double snr : {-5.0, 0.0, 10.0, 20.0}) {
    const MixResult r = mix_at_snr(speech, noise, snr, 642);
    const double measured = 10.0 * std::log10(signal_power(speech) /
                                              signal_power(r.scaled_noise));
    c.expect(std::fabs(measured - snr) < 1e-6,
             "SNR " + std::to_string(snr) + " measured " +
                 std::to_string(measured));
  }

  {  // Gilbert-Elliott stationary loss over 1e6 packets
    AudioSignal carrier;
    carrier.rate_hz = 8000;
    carrier.samples.assign(1000000, 0.5);
    const PacketLossResult r = packet_loss(carrier, 0.05, 0.5, 0.125, 643);
    c.expect(r.loss_mask.size() == 1000000, "packet count");
    double lost = 0.0;
    for (bool b : r.loss_mask) lost += b;
    const double rate = lost / 1e6;
    c.expect(std::fabs(rate - 0.05 / 0.55) <= 0.003,
             "loss rate " + std::to_string(rate));
  }

  {  // bandlimit stopband on white noise
    const AudioSignal x = white_noise(48000, 1.0, 644);
    const AudioSignal y = bandlimit(x, 8000);
    const auto psd = welch_psd(y, 4096);
    double pass = 0.0, stop_max = 0.0;
    size_t pass_n = 0;
    for (size_t k = 0; k < psd.size(); ++k) {
      const double f = static_cast<double>(k) * 48000.0 / 4096.0;
      if (f > 100.0 && f < 3400.0) {
        pass += psd[k];
        ++pass_n;
      }
      if (f >= 4400.0) stop_max = std::max(stop_max, psd[k]);
    }
    const double rel_db = 10.0 * std::log10(stop_max * pass_n / pass);
    c.expect(rel_db <= -60.0,
             "bandlimit stopband " + std::to_string(rel_db) + " dB");
  }

  {  // hard-limiter idempotence, exact
    Rng rng(645);
    for (int trial = 0; trial < 50; ++trial) {
      const AudioSignal x = white_noise(16000, 0.1, 646 + trial);
      const double ratio = rng.uniform(0.1, 0.95);
      const AudioSignal once = clip(x, ratio);
      const double threshold = ratio * peak_abs(x);
      c.expect(peak_abs(once) <= threshold, "clip exceeded threshold");
      const AudioSignal twice = clip_abs(once, threshold);
      c.expect(twice.samples == once.samples, "clip not idempotent");
    }
  }
  if (!c.ok) g_notes.push_back("criterion 4: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 5. Simulate determinism across worker counts plus resume.

bool criterion5(const fs::path &work) {
  Check c;
  const fs::path audio = work / "audio";
  fs::create_directories(audio);

  std::vector<UtteranceRecord> records;
  for (int i = 0; i < 50; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "utt%03d", i);
    write_wav(synth_speech(16000, 1.2, 700 + i), audio / (std::string(id) + ".wav"));
    UtteranceRecord r;
    r.utterance_id = id;
    r.path = (audio / (std::string(id) + ".wav")).string();
    r.language = i % 2 ? "en" : "de";
    r.corpus = "synth";
    r.duration_s = 1.2;
    r.assigned_rate_hz = 16000;
    records.push_back(r);
  }
  write_manifest(records, work / "manifest.jsonl");

  write_wav(white_noise(16000, 2.0, 701), audio / "noise.wav");
  {
    std::ofstream os(work / "noises.jsonl");
    os << json{{"id", "n0"}, {"path", (audio / "noise.wav").string()}}
       << "\n";
  }
  AudioSignal rir;
  rir.rate_hz = 16000;
  rir.samples.assign(320, 0.0);
  rir.samples[0] = 1.0;
  Rng rng(702);
  for (size_t i = 1; i < rir.samples.size(); ++i)
    rir.samples[i] =
        0.35 * rng.normal() * std::exp(-static_cast<double>(i) / 64.0);
  write_wav(rir, audio / "rir.wav");
  {
    std::ofstream os(work / "rirs.jsonl");
    os << json{{"id", "r0"}, {"path", (audio / "rir.wav").string()}} << "\n";
  }

  json config;
  config["master_seed"] = 20250809;
  config["simulate"] = {
      {"manifest", (work / "manifest.jsonl").string()},
      {"noise_manifest", (work / "noises.jsonl").string()},
      {"rir_manifest", (work / "rirs.jsonl").string()},
      {"out_dir", (work / "sim").string()},
      {"sampler",
       {{"wind_prob", 0.2},
        {"reverb_prob", 0.5},
        {"clip_prob", 0.3},
        {"bandwidth_prob", 0.4},
        {"codec_prob", 0.0},
        {"packet_loss_prob", 0.4}}}};
  {
    std::ofstream os(work / "config.json");
    os << config.dump(2);
  }

  auto run = [&](int workers) {
    const std::string cmd = std::string(URGENTKIT_CLI_PATH) +
                            " simulate --workers " + std::to_string(workers) +
                            " --config " + (work / "config.json").string() +
                            " > " + (work / "log.txt").string() + " 2>&1";
    return std::system(cmd.c_str());
  };

  std::map<int, uint64_t> hashes;
  for (int workers : {1, 4, 8}) {
    fs::remove_all(work / "sim");
    if (run(workers) != 0) {
      c.expect(false, "simulate failed with " + std::to_string(workers) +
                          " workers: " + slurp(work / "log.txt"));
      break;
    }
    hashes[workers] = tree_hash(work / "sim");
  }
  c.expect(hashes.size() == 3, "not all runs completed");
  if (hashes.size() == 3) {
    c.expect(hashes[1] == hashes[4] && hashes[4] == hashes[8],
             "trees differ across worker counts");
  }

  // rerun: byte-identical tree, zero rewrites (mtimes untouched)
  std::map<std::string, fs::file_time_type> mtimes;
  for (const auto &p : fs::recursive_directory_iterator(work / "sim"))
    if (p.is_regular_file())
      mtimes[p.path().string()] = fs::last_write_time(p.path());
  c.expect(run(4) == 0, "resume run failed");
  c.expect(tree_hash(work / "sim") == hashes[8], "resume changed the tree");
  bool untouched = true;
  for (const auto &p : fs::recursive_directory_iterator(work / "sim"))
    if (p.is_regular_file() &&
        fs::last_write_time(p.path()) != mtimes[p.path().string()])
      untouched = false;
  c.expect(untouched, "resume rewrote files");
  c.expect(slurp(work / "log.txt").find("50 resumed") != std::string::npos,
           "resume did not skip all utterances");

  if (!c.ok) g_notes.push_back("criterion 5: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 6. Preprocessing behavior.

bool criterion6(const fs::path &work) {
  Check c;
  c.expect(lowest_covering_sf(3500.0) == 8000, "3500 -> 8000");
  c.expect(lowest_covering_sf(7500.0) == 16000, "7500 -> 16000");
  c.expect(lowest_covering_sf(23000.0) == 48000, "23000 -> 48000");

  const fs::path audio = work / "prep_audio";
  fs::create_directories(audio);

  // content stops at 7.4 kHz but the file is stored at 48 kHz
  const AudioSignal narrow = bandpass_noise(48000, 2.0, 50.0, 7400.0, 800);
  write_wav(narrow, audio / "narrow.wav");
  AudioSignal silence(std::vector<double>(96000, 0.0), 48000);
  write_wav(silence, audio / "quiet.wav");

  std::vector<UtteranceRecord> records(2);
  records[0].utterance_id = "narrow";
  records[0].path = (audio / "narrow.wav").string();
  records[0].corpus = "c";
  records[1].utterance_id = "quiet";
  records[1].path = (audio / "quiet.wav").string();
  records[1].corpus = "c";
  write_manifest(records, work / "prep_in.jsonl");

  json config;
  config["prep"] = {{"manifest_in", (work / "prep_in.jsonl").string()},
                    {"manifest_out", (work / "prep_out.jsonl").string()},
                    {"out_dir", (work / "prepped").string()}};
  {
    std::ofstream os(work / "prep_config.json");
    os << config.dump(2);
  }
  const std::string cmd = std::string(URGENTKIT_CLI_PATH) +
                          " prep --config " +
                          (work / "prep_config.json").string() + " > " +
                          (work / "prep_log.txt").string() + " 2>&1";
  c.expect(std::system(cmd.c_str()) == 0, "prep failed");

  const auto out = read_manifest(work / "prep_out.jsonl");
  c.expect(out.size() == 1, "expected one kept record");
  if (out.size() == 1) {
    c.expect(out[0].utterance_id == "narrow", "wrong record kept");
    c.expect(out[0].assigned_rate_hz == 16000,
             "assigned " + std::to_string(out[0].assigned_rate_hz));
    const AudioSignal emitted = read_wav(out[0].path);
    c.expect(emitted.rate_hz == 16000, "emitted rate");
  }
  const json report = json::parse(slurp(work / "prep_log.txt"));
  c.expect(report["dropped_by_vad"] == 1, "silence was not dropped by VAD");

  if (!c.ok) g_notes.push_back("criterion 6: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 7. ESTOI strictly increasing in SNR.

bool criterion7() {
  Check c;
  for (int i = 0; i < 20; ++i) {
    const AudioSignal speech = synth_speech(16000, 3.0, 900 + i);
    const AudioSignal noise = white_noise(16000, 3.0, 950 + i);
    double prev = -2.0;
    for (double snr : {0.0, 10.0, 20.0}) {
      const MixResult mix = mix_at_snr(speech, noise, snr, 980 + i);
      const double score = estoi(speech, mix.mixture);
      c.expect(score > prev, "fixture " + std::to_string(i) + " at " +
                                 std::to_string(snr) + " dB not increasing");
      prev = score;
    }
  }
  if (!c.ok) g_notes.push_back("criterion 7: " + c.detail);
  return c.ok;
}

// ---------------------------------------------------------------------------
// 8. Ranking properties on random tables.

bool criterion8() {
  Check c;
  Rng rng(1000);

  for (int trial = 0; trial < 200; ++trial) {  // tie-averaged rank sums
    const size_t n = 2 + rng.uniform_int(20);
    std::map<std::string, double> means;
    for (size_t s = 0; s < n; ++s)
      means["s" + std::to_string(s)] = std::floor(rng.uniform(0.0, 6.0));
    const auto ranks = rank_metric(
        means, trial % 2 ? Direction::kHigherBetter : Direction::kLowerBetter);
    double sum = 0.0;
    for (const auto &[sys, r] : ranks) sum += r;
    if (std::fabs(sum - n * (n + 1) / 2.0) > 1e-9) {
      c.expect(false, "rank sum " + std::to_string(sum) + " for n = " +
                          std::to_string(n));
      break;
    }
  }

  CategoryConfig config;
  config.categories = {{"a", {"m1", "m2"}}, {"b", {"m3"}}};
  config.directions = {{"m1", Direction::kHigherBetter},
                       {"m2", Direction::kLowerBetter},
                       {"m3", Direction::kHigherBetter}};
  for (int trial = 0; trial < 200; ++trial) {  // argrank invariance
    const int n = 2 + static_cast<int>(rng.uniform_int(8));
    std::vector<ScoreTable::Entry> entries;
    for (int s = 0; s < n; ++s)
      for (const auto &m : {"m1", "m2", "m3"})
        entries.push_back({"s" + std::to_string(s), "u", m,
                           std::floor(rng.uniform(0.0, 7.0))});
    auto build = [&](const std::vector<ScoreTable::Entry> &es) {
      ScoreTable t;
      for (const auto &m : {"m1", "m2", "m3"})
        t.add_descriptor({m, Direction::kHigherBetter,
                          MetricCategory::kIntrusive,
                          MetricSource::kIngested});
      for (const auto &e : es)
        t.add(e.system_id, e.utterance_id, e.metric, e.value);
      return build_leaderboard(t, config);
    };
    const Leaderboard base = build(entries);
    for (auto &e : entries)  // strictly increasing transform on m1
      if (e.metric == "m1") e.value = std::exp(0.5 * e.value) - 2.0;
    const Leaderboard mapped = build(entries);
    for (size_t i = 0; i < base.rows.size(); ++i) {
      if (base.rows[i].system_id != mapped.rows[i].system_id ||
          std::fabs(base.rows[i].final_score - mapped.rows[i].final_score) >
              1e-9) {
        c.expect(false, "argrank invariance broken at trial " +
                            std::to_string(trial));
        break;
      }
    }
    if (!c.ok) break;
  }
  if (!c.ok) g_notes.push_back("criterion 8: " + c.detail);
  return c.ok;
}

}  // namespace

int main() {
  const fs::path work =
      fs::temp_directory_path() /
      ("urgentkit_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  auto guard = [&](int n, const std::string &what, bool (*fn)()) {
    bool ok = false;
    try {
      ok = fn();
    } catch (const std::exception &e) {
      g_notes.push_back("criterion " + std::to_string(n) + " threw: " +
                        e.what());
    }
    report(n, what, ok);
  };

  guard(1, "published leaderboard rows reproduced from rank fixture",
        criterion1);
  guard(2, "metric identity suite on 20 random signals", criterion2);
  guard(3, "oracle equivalence (edit distance, LSD, MCD, convolution)",
        criterion3);
  guard(4, "degradation invariants (SNR, packet loss, bandlimit, clip)",
        criterion4);
  {
    bool ok = false;
    try {
      ok = criterion5(work);
    } catch (const std::exception &e) {
      g_notes.push_back(std::string("criterion 5 threw: ") + e.what());
    }
    report(5, "simulate determinism across {1,4,8} workers and resume", ok);
  }
  {
    bool ok = false;
    try {
      ok = criterion6(work);
    } catch (const std::exception &e) {
      g_notes.push_back(std::string("criterion 6 threw: ") + e.what());
    }
    report(6, "preprocessing: covering SF, prep resampling, VAD drop", ok);
  }
  guard(7, "ESTOI strictly increasing in SNR on 20 fixtures", criterion7);
  guard(8, "ranking rank-sum and argrank-invariance properties", criterion8);

  for (const auto &note : g_notes) std::fprintf(stderr, "note: %s\n", note.c_str());
  std::error_code ec;
  fs::remove_all(work, ec);
  return g_failures == 0 ? 0 : 1;
}
