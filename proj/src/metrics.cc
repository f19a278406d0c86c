// src/metrics.cc

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

#include "urgentkit/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "urgentkit/fft.h"
#include "urgentkit/manifest.h"
#include "urgentkit/resample.h"
#include "urgentkit/stft.h"
#include "urgentkit/wav.h"

namespace urgentkit {

namespace {

constexpr double kSdrCapDb = 100.0;
constexpr double kSdrCapRatio = 1e-20;
constexpr int kLsdFft = 2048;
constexpr int kLsdHop = 512;
constexpr double kLsdPowerFloor = 1e-10;
constexpr int kMcdMelBands = 80;
constexpr int kMcdCoeffs = 13;  // c1..c13, c0 excluded so gain drops out

// Truncate a pair to the shorter signal (codec and packet-loss tails may
// differ by a few samples).
void align_pair(AudioSignal &a, AudioSignal &b) {
  const size_t n = std::min(a.size(), b.size());
  a.samples.resize(n);
  b.samples.resize(n);
}

void require_same_rate(const AudioSignal &a, const AudioSignal &b,
                       const char *what) {
  if (a.rate_hz != b.rate_hz)
    throw Error(ErrorCode::kRateMismatch,
                std::string(what) + ": rates differ (" +
                    std::to_string(a.rate_hz) + " vs " +
                    std::to_string(b.rate_hz) + ")");
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

// ---------------------------------------------------------------------------
// Descriptors

const std::vector<MetricDescriptor> &challenge_metrics() {
  using D = Direction;
  using C = MetricCategory;
  using S = MetricSource;
  static const std::vector<MetricDescriptor> kMetrics = {
      {"DNSMOS", D::kHigherBetter, C::kNonIntrusive, S::kIngested},
      {"NISQA", D::kHigherBetter, C::kNonIntrusive, S::kIngested},
      {"UTMOS", D::kHigherBetter, C::kNonIntrusive, S::kIngested},
      {"POLQA", D::kHigherBetter, C::kIntrusive, S::kIngested},
      {"PESQ", D::kHigherBetter, C::kIntrusive, S::kIngested},
      {"ESTOI", D::kHigherBetter, C::kIntrusive, S::kComputed},
      {"SDR", D::kHigherBetter, C::kIntrusive, S::kComputed},
      {"MCD", D::kLowerBetter, C::kIntrusive, S::kComputed},
      {"LSD", D::kLowerBetter, C::kIntrusive, S::kComputed},
      {"SBS", D::kHigherBetter, C::kDownstreamIndependent, S::kIngested},
      {"LPS", D::kHigherBetter, C::kDownstreamIndependent, S::kIngested},
      {"SpkSim", D::kHigherBetter, C::kDownstreamDependent, S::kIngested},
      {"CAcc", D::kHigherBetter, C::kDownstreamDependent, S::kComputed},
      {"MOS", D::kHigherBetter, C::kSubjective, S::kIngested},
  };
  return kMetrics;
}

const char *direction_name(Direction d) {
  return d == Direction::kHigherBetter ? "higher_better" : "lower_better";
}

Direction direction_from_name(const std::string &name) {
  if (name == "higher_better") return Direction::kHigherBetter;
  if (name == "lower_better") return Direction::kLowerBetter;
  throw Error(ErrorCode::kParseError, "unknown direction: " + name);
}

const char *category_name(MetricCategory c) {
  switch (c) {
    case MetricCategory::kNonIntrusive: return "non_intrusive";
    case MetricCategory::kIntrusive: return "intrusive";
    case MetricCategory::kDownstreamIndependent:
      return "downstream_independent";
    case MetricCategory::kDownstreamDependent: return "downstream_dependent";
    case MetricCategory::kSubjective: return "subjective";
  }
  return "unknown";
}

MetricCategory category_from_name(const std::string &name) {
  for (MetricCategory c :
       {MetricCategory::kNonIntrusive, MetricCategory::kIntrusive,
        MetricCategory::kDownstreamIndependent,
        MetricCategory::kDownstreamDependent, MetricCategory::kSubjective}) {
    if (name == category_name(c)) return c;
  }
  throw Error(ErrorCode::kParseError, "unknown metric category: " + name);
}

// ---------------------------------------------------------------------------
// ScoreTable

void ScoreTable::add_descriptor(const MetricDescriptor &d) {
  for (const auto &existing : descriptors_)
    if (existing.name == d.name) return;
  descriptors_.push_back(d);
}

bool ScoreTable::has_descriptor(const std::string &metric) const {
  for (const auto &d : descriptors_)
    if (d.name == metric) return true;
  return false;
}

const MetricDescriptor &ScoreTable::descriptor(
    const std::string &metric) const {
  for (const auto &d : descriptors_)
    if (d.name == metric) return d;
  throw Error(ErrorCode::kConfigError, "no descriptor for metric " + metric);
}

void ScoreTable::add(const std::string &system_id,
                     const std::string &utterance_id,
                     const std::string &metric, double value) {
  if (!has_descriptor(metric))
    throw Error(ErrorCode::kConfigError,
                "ScoreTable: metric '" + metric + "' has no descriptor");
  if (std::isnan(value))
    throw Error(ErrorCode::kNanValue,
                "ScoreTable: NaN value for (" + system_id + ", " +
                    utterance_id + ", " + metric + ")");
  const std::string key =
      system_id + '\x1f' + utterance_id + '\x1f' + metric;
  if (index_.count(key))
    throw Error(ErrorCode::kDuplicateEntry,
                "ScoreTable: duplicate entry for system '" + system_id +
                    "', utterance '" + utterance_id + "', metric '" + metric +
                    "'");
  index_[key] = entries_.size();
  entries_.push_back({system_id, utterance_id, metric, value});
}

std::vector<std::string> ScoreTable::systems() const {
  std::vector<std::string> out;
  for (const auto &e : entries_)
    if (std::find(out.begin(), out.end(), e.system_id) == out.end())
      out.push_back(e.system_id);
  std::sort(out.begin(), out.end());
  return out;
}

std::string ScoreTable::to_csv() const {
  std::vector<const Entry *> sorted;
  sorted.reserve(entries_.size());
  for (const auto &e : entries_) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(),
            [](const Entry *a, const Entry *b) {
              return std::tie(a->system_id, a->utterance_id, a->metric) <
                     std::tie(b->system_id, b->utterance_id, b->metric);
            });
  std::string out = "system_id,utterance_id,metric,value\n";
  for (const Entry *e : sorted) {
    out += e->system_id;
    out += ',';
    out += e->utterance_id;
    out += ',';
    out += e->metric;
    out += ',';
    out += format_double(e->value);
    out += '\n';
  }
  return out;
}

void ScoreTable::write_csv(const std::filesystem::path &path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  os << to_csv();
}

ScoreTable ScoreTable::from_csv(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  ScoreTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields != std::vector<std::string>{"system_id", "utterance_id",
                                             "metric", "value"})
        throw Error(ErrorCode::kParseError,
                    path.string() + ": expected header "
                                    "system_id,utterance_id,metric,value");
      continue;
    }
    if (fields.size() != 4)
      throw Error(ErrorCode::kParseError,
                  path.string() + ": malformed row at line " +
                      std::to_string(line_no));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(
        fields[3].data(), fields[3].data() + fields[3].size(), value);
    if (ec != std::errc() || ptr != fields[3].data() + fields[3].size() ||
        std::isnan(value))
      throw Error(ErrorCode::kParseError,
                  path.string() + ": bad value at line " +
                      std::to_string(line_no));
    if (!table.has_descriptor(fields[2])) {
      bool known = false;
      for (const auto &d : challenge_metrics()) {
        if (d.name == fields[2]) {
          table.add_descriptor(d);
          known = true;
          break;
        }
      }
      if (!known)
        table.add_descriptor({fields[2], Direction::kHigherBetter,
                              MetricCategory::kIntrusive,
                              MetricSource::kIngested});
    }
    table.add(fields[0], fields[1], fields[2], value);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Signal metrics

double sdr(const AudioSignal &reference, const AudioSignal &estimate) {
  require_same_rate(reference, estimate, "sdr");
  AudioSignal ref = reference, est = estimate;
  align_pair(ref, est);
  check_signal(ref, "sdr(reference)");
  check_signal(est, "sdr(estimate)");

  double sig = 0.0, err = 0.0;
  for (size_t i = 0; i < ref.size(); ++i) {
    sig += ref.samples[i] * ref.samples[i];
    const double d = ref.samples[i] - est.samples[i];
    err += d * d;
  }
  if (sig <= 0.0)
    throw Error(ErrorCode::kSilentSignal, "sdr: silent reference");
  if (err < kSdrCapRatio * sig) return kSdrCapDb;
  return 10.0 * std::log10(sig / err);
}

double lsd(const AudioSignal &reference, const AudioSignal &estimate) {
  require_same_rate(reference, estimate, "lsd");
  AudioSignal ref = reference, est = estimate;
  align_pair(ref, est);
  if (ref.size() < kLsdFft)
    throw Error(ErrorCode::kTooShort,
                "lsd: signal shorter than one 2048-sample frame");

  const SpectralFrames fr = stft(ref, kLsdFft, kLsdHop, "hann_sym");
  const SpectralFrames fe = stft(est, kLsdFft, kLsdHop, "hann_sym");
  const size_t n_frames = std::min(fr.frame_count(), fe.frame_count());
  const size_t n_bins = fr.bin_count();

  double total = 0.0;
  for (size_t f = 0; f < n_frames; ++f) {
    double acc = 0.0;
    for (size_t k = 0; k < n_bins; ++k) {
      const double pr = std::max(std::norm(fr.frames[f][k]), kLsdPowerFloor);
      const double pe = std::max(std::norm(fe.frames[f][k]), kLsdPowerFloor);
      const double d = 10.0 * std::log10(pr / pe);
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(n_bins));
  }
  return total / static_cast<double>(n_frames);
}

namespace {

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) {
  return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

// Triangular mel filterbank, HTK-style, spanning 0..Nyquist.
std::vector<std::vector<double>> mel_filterbank(int rate_hz, int n_fft,
                                                int n_bands) {
  const int n_bins = n_fft / 2 + 1;
  std::vector<double> edges(n_bands + 2);
  const double mel_max = hz_to_mel(rate_hz / 2.0);
  for (int i = 0; i < n_bands + 2; ++i)
    edges[i] = mel_to_hz(mel_max * i / (n_bands + 1));
  std::vector<std::vector<double>> fb(n_bands,
                                      std::vector<double>(n_bins, 0.0));
  for (int b = 0; b < n_bands; ++b) {
    const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * rate_hz / n_fft;
      if (f >= lo && f < mid)
        fb[b][k] = (f - lo) / std::max(mid - lo, 1e-12);
      else if (f >= mid && f < hi)
        fb[b][k] = (hi - f) / std::max(hi - mid, 1e-12);
    }
  }
  return fb;
}

}  // namespace

double mcd(const AudioSignal &reference, const AudioSignal &estimate) {
  require_same_rate(reference, estimate, "mcd");
  AudioSignal ref = reference, est = estimate;
  align_pair(ref, est);

  const int rate = ref.rate_hz;
  const int frame_len = static_cast<int>(std::nearbyint(0.025 * rate));
  const int hop = static_cast<int>(std::nearbyint(0.010 * rate));
  if (ref.size() < static_cast<size_t>(frame_len))
    throw Error(ErrorCode::kTooShort, "mcd: signal shorter than one frame");
  const int n_fft = static_cast<int>(next_pow2(frame_len));
  const std::vector<double> win = symmetric_hann_window(frame_len);
  const auto fb = mel_filterbank(rate, n_fft, kMcdMelBands);

  // DCT-II basis rows d = 1..13 over the 80 log mel energies. c0 carries
  // the overall gain and is excluded.
  std::vector<std::vector<double>> dct(kMcdCoeffs,
                                       std::vector<double>(kMcdMelBands));
  for (int d = 1; d <= kMcdCoeffs; ++d)
    for (int m = 0; m < kMcdMelBands; ++m)
      dct[d - 1][m] =
          std::cos(M_PI * d * (m + 0.5) / static_cast<double>(kMcdMelBands));

  const size_t n_frames = (ref.size() - frame_len) / hop + 1;
  const double scale = 10.0 / std::log(10.0);

  auto frame_cepstrum = [&](const std::vector<double> &x, size_t start,
                            std::vector<double> &ceps) {
    std::vector<double> frame(frame_len);
    for (int i = 0; i < frame_len; ++i) frame[i] = win[i] * x[start + i];
    const auto spec = rfft(frame, n_fft);
    std::vector<double> logmel(kMcdMelBands);
    for (int b = 0; b < kMcdMelBands; ++b) {
      double acc = 0.0;
      for (size_t k = 0; k < spec.size(); ++k)
        acc += fb[b][k] * std::norm(spec[k]);
      logmel[b] = std::log(acc + 1e-10);
    }
    for (int d = 0; d < kMcdCoeffs; ++d) {
      double acc = 0.0;
      for (int m = 0; m < kMcdMelBands; ++m) acc += dct[d][m] * logmel[m];
      ceps[d] = acc;
    }
  };

  double total = 0.0;
  std::vector<double> cr(kMcdCoeffs), ce(kMcdCoeffs);
  for (size_t f = 0; f < n_frames; ++f) {
    frame_cepstrum(ref.samples, f * hop, cr);
    frame_cepstrum(est.samples, f * hop, ce);
    double acc = 0.0;
    for (int d = 0; d < kMcdCoeffs; ++d) {
      const double diff = cr[d] - ce[d];
      acc += diff * diff;
    }
    total += scale * std::sqrt(2.0 * acc);
  }
  return total / static_cast<double>(n_frames);
}

// ---------------------------------------------------------------------------
// Edit distance and character accuracy

int edit_distance(std::span<const uint32_t> reference,
                  std::span<const uint32_t> hypothesis) {
  const size_t n = reference.size(), m = hypothesis.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      const int sub =
          prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

namespace {

std::vector<uint32_t> utf8_decode(const std::string &s) {
  std::vector<uint32_t> out;
  size_t i = 0;
  while (i < s.size()) {
    const unsigned char c = s[i];
    uint32_t cp = 0;
    int extra = 0;
    if (c < 0x80) {
      cp = c;
    } else if ((c & 0xe0) == 0xc0) {
      cp = c & 0x1f;
      extra = 1;
    } else if ((c & 0xf0) == 0xe0) {
      cp = c & 0x0f;
      extra = 2;
    } else if ((c & 0xf8) == 0xf0) {
      cp = c & 0x07;
      extra = 3;
    } else {
      ++i;  // stray continuation byte, drop it
      continue;
    }
    bool ok = true;
    for (int k = 1; k <= extra; ++k) {
      if (i + k >= s.size() || (s[i + k] & 0xc0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (s[i + k] & 0x3f);
    }
    if (ok) {
      out.push_back(cp);
      i += extra + 1;
    } else {
      ++i;
    }
  }
  return out;
}

bool is_punct_cp(uint32_t cp) {
  if (cp < 0x80)
    return std::ispunct(static_cast<int>(cp)) != 0;
  switch (cp) {
    case 0x00a1: case 0x00ab: case 0x00bb: case 0x00bf:
    case 0x2013: case 0x2014: case 0x2018: case 0x2019:
    case 0x201a: case 0x201c: case 0x201d: case 0x201e:
    case 0x2026: case 0x3001: case 0x3002: case 0x300c:
    case 0x300d: case 0xff01: case 0xff08: case 0xff09:
    case 0xff0c: case 0xff0e: case 0xff1a: case 0xff1b:
    case 0xff1f:
      return true;
    default:
      return false;
  }
}

bool is_space_cp(uint32_t cp) {
  return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == 0x3000;
}

bool spaces_are_tokens(const std::string &language) {
  // zh/zn (the challenge tag), ja, ko and th are written without word
  // spaces; everything else keeps single spaces as characters.
  return !(language == "zh" || language == "zn" || language == "ja" ||
           language == "ko" || language == "th");
}

}  // namespace

std::vector<uint32_t> normalize_transcript(const std::string &text,
                                           const std::string &language) {
  std::vector<uint32_t> cps = utf8_decode(text);
  std::vector<uint32_t> out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (uint32_t cp : cps) {
    // ASCII + Latin-1 casefold; other scripts pass through.
    if (cp >= 'A' && cp <= 'Z') cp += 32;
    else if (cp >= 0x00c0 && cp <= 0x00de && cp != 0x00d7) cp += 32;

    if (cp == '\'' || cp == 0x2019) continue;  // apostrophes join words
    if (is_space_cp(cp) || is_punct_cp(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(cp);
  }
  if (!spaces_are_tokens(language)) {
    std::erase(out, static_cast<uint32_t>(' '));
  }
  return out;
}

double char_accuracy(const std::string &reference,
                     const std::string &hypothesis,
                     const std::string &language) {
  const std::vector<uint32_t> ref = normalize_transcript(reference, language);
  const std::vector<uint32_t> hyp =
      normalize_transcript(hypothesis, language);
  if (ref.empty())
    throw Error(ErrorCode::kEmptyData,
                "char_accuracy: empty reference after normalization");
  const int dist = edit_distance(ref, hyp);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(ref.size());
}

// ---------------------------------------------------------------------------
// Ingest and batch evaluation

void ingest_scores(const std::filesystem::path &csv,
                   const MetricDescriptor &descriptor, ScoreTable &table) {
  if (descriptor.source != MetricSource::kIngested)
    throw Error(ErrorCode::kConfigError,
                "ingest_scores: metric '" + descriptor.name +
                    "' is not an ingested metric");
  std::ifstream in(csv);
  if (!in)
    throw Error(ErrorCode::kIoError,
                "ingest_scores: cannot read " + csv.string());
  table.add_descriptor(descriptor);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (line_no == 1) {
      if (fields !=
          std::vector<std::string>{"system_id", "utterance_id", "value"})
        throw Error(ErrorCode::kParseError,
                    csv.string() +
                        ": expected header system_id,utterance_id,value");
      continue;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
      throw Error(ErrorCode::kParseError,
                  csv.string() + ": malformed row at line " +
                      std::to_string(line_no));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(
        fields[2].data(), fields[2].data() + fields[2].size(), value);
    if (ec != std::errc() || ptr != fields[2].data() + fields[2].size())
      throw Error(ErrorCode::kParseError,
                  csv.string() + ": bad value at line " +
                      std::to_string(line_no));
    if (std::isnan(value))
      throw Error(ErrorCode::kNanValue,
                  csv.string() + ": NaN value at line " +
                      std::to_string(line_no));
    table.add(fields[0], fields[1], descriptor.name, value);
  }
}

ScoreTable evaluate_manifest(
    const std::filesystem::path &manifest,
    const std::map<std::string, std::string> &system_dirs,
    const std::vector<MetricDescriptor> &metrics, int workers) {
  const std::vector<UtteranceRecord> records = read_manifest(manifest);

  // Fail on all missing enhanced files at once.
  std::vector<std::string> missing;
  for (const auto &[system_id, dir] : system_dirs) {
    for (const auto &r : records) {
      const auto path =
          std::filesystem::path(dir) / (r.utterance_id + ".wav");
      if (!std::filesystem::exists(path)) missing.push_back(path.string());
    }
  }
  if (!missing.empty()) {
    std::string msg = "evaluate: missing enhanced files:";
    for (const auto &m : missing) msg += "\n  " + m;
    throw Error(ErrorCode::kMissingFiles, msg);
  }

  struct Job {
    std::string system_id;
    std::string dir;
    const UtteranceRecord *record;
  };
  std::vector<Job> jobs;
  for (const auto &[system_id, dir] : system_dirs)
    for (const auto &r : records) jobs.push_back({system_id, dir, &r});

  std::vector<std::vector<double>> values(
      jobs.size(), std::vector<double>(metrics.size(), 0.0));
  std::vector<std::string> failures(jobs.size());

#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, workers))
  for (long j = 0; j < static_cast<long>(jobs.size()); ++j) {
    const Job &job = jobs[j];
    try {
      AudioSignal ref = read_wav(job.record->path);
      AudioSignal est = read_wav(std::filesystem::path(job.dir) /
                                 (job.record->utterance_id + ".wav"));
      if (est.rate_hz != ref.rate_hz) est = resample(est, ref.rate_hz);
      const size_t longer = std::max(ref.size(), est.size());
      const size_t mismatch = longer - std::min(ref.size(), est.size());
      if (mismatch > 0.005 * static_cast<double>(longer))
        std::fprintf(stderr,
                     "warning: %s/%s: length mismatch of %zu samples; "
                     "truncating to the shorter signal\n",
                     job.system_id.c_str(),
                     job.record->utterance_id.c_str(), mismatch);
      for (size_t m = 0; m < metrics.size(); ++m) {
        const std::string &name = metrics[m].name;
        if (name == "SDR") values[j][m] = sdr(ref, est);
        else if (name == "LSD") values[j][m] = lsd(ref, est);
        else if (name == "MCD") values[j][m] = mcd(ref, est);
        else if (name == "ESTOI") values[j][m] = estoi(ref, est);
        else
          throw Error(ErrorCode::kConfigError,
                      "evaluate: metric '" + name +
                          "' is not computable here");
      }
    } catch (const std::exception &e) {
      failures[j] = job.system_id + "/" + job.record->utterance_id + ": " +
                    e.what();
    }
  }

  std::string failure_msg;
  for (const auto &f : failures)
    if (!f.empty()) failure_msg += "\n  " + f;
  if (!failure_msg.empty())
    throw Error(ErrorCode::kInvalidArgument,
                "evaluate: metric computation failed:" + failure_msg);

  ScoreTable table;
  for (const auto &m : metrics) table.add_descriptor(m);
  for (size_t j = 0; j < jobs.size(); ++j)
    for (size_t m = 0; m < metrics.size(); ++m)
      table.add(jobs[j].system_id, jobs[j].record->utterance_id,
                metrics[m].name, values[j][m]);
  return table;
}

}  // namespace urgentkit
