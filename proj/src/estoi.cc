// src/estoi.cc

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

#include <cmath>
#include <vector>

#include "urgentkit/metrics.h"
#include "urgentkit/resample.h"
#include "urgentkit/stft.h"

namespace urgentkit {

namespace {

constexpr int kEstoiRate = 10000;
constexpr int kEstoiFft = 512;
constexpr int kEstoiHop = 256;
constexpr double kSilenceRangeDb = 40.0;
constexpr int kNumBands = 15;
constexpr double kFirstBandHz = 150.0;
constexpr int kSegmentFrames = 30;

// One-third-octave band energies from an STFT frame: band j is centered at
// 150 * 2^(j/3) Hz and spans [cf * 2^(-1/6), cf * 2^(1/6)). The band value
// is the 2-norm of the bin magnitudes inside it.
std::vector<std::vector<int>> band_bins() {
  std::vector<std::vector<int>> bins(kNumBands);
  for (int j = 0; j < kNumBands; ++j) {
    const double cf = kFirstBandHz * std::pow(2.0, j / 3.0);
    const double lo = cf * std::pow(2.0, -1.0 / 6.0);
    const double hi = cf * std::pow(2.0, 1.0 / 6.0);
    for (int k = 0; k <= kEstoiFft / 2; ++k) {
      const double f = static_cast<double>(k) * kEstoiRate / kEstoiFft;
      if (f >= lo && f < hi) bins[j].push_back(k);
    }
  }
  return bins;
}

// Zero-mean, unit-norm over rows (each band's 30-frame track), then over
// columns (each frame's band profile). The tiny additive term only guards
// exact zeros; any nonzero norm is unaffected at double precision.
void normalize_segment(std::vector<std::vector<double>> &seg) {
  const size_t bands = seg.size();
  const size_t frames = seg[0].size();
  for (size_t b = 0; b < bands; ++b) {
    double mean = 0.0;
    for (double v : seg[b]) mean += v;
    mean /= static_cast<double>(frames);
    double norm = 0.0;
    for (double &v : seg[b]) {
      v -= mean;
      norm += v * v;
    }
    norm = std::sqrt(norm) + 1e-300;
    for (double &v : seg[b]) v /= norm;
  }
  for (size_t f = 0; f < frames; ++f) {
    double mean = 0.0;
    for (size_t b = 0; b < bands; ++b) mean += seg[b][f];
    mean /= static_cast<double>(bands);
    double norm = 0.0;
    for (size_t b = 0; b < bands; ++b) {
      seg[b][f] -= mean;
      norm += seg[b][f] * seg[b][f];
    }
    norm = std::sqrt(norm) + 1e-300;
    for (size_t b = 0; b < bands; ++b) seg[b][f] /= norm;
  }
}

}  // namespace

double estoi(const AudioSignal &reference, const AudioSignal &estimate) {
  if (reference.rate_hz != estimate.rate_hz)
    throw Error(ErrorCode::kRateMismatch, "estoi: rates differ");
  check_signal(reference, "estoi(reference)");
  check_signal(estimate, "estoi(estimate)");

  AudioSignal ref = reference.rate_hz == kEstoiRate
                        ? reference
                        : resample(reference, kEstoiRate);
  AudioSignal est = estimate.rate_hz == kEstoiRate
                        ? estimate
                        : resample(estimate, kEstoiRate);
  const size_t n = std::min(ref.size(), est.size());
  ref.samples.resize(n);
  est.samples.resize(n);

  const SpectralFrames sr = stft(ref, kEstoiFft, kEstoiHop, "hann");
  const SpectralFrames se = stft(est, kEstoiFft, kEstoiHop, "hann");
  const size_t total_frames = std::min(sr.frame_count(), se.frame_count());

  // Discard frames whose reference energy sits more than 40 dB below the
  // loudest frame. Energies are taken on the Hann-windowed time frames.
  const std::vector<double> win = hann_window(kEstoiFft);
  std::vector<double> frame_energy(total_frames, 0.0);
  double max_energy = 0.0;
  for (size_t f = 0; f < total_frames; ++f) {
    double acc = 0.0;
    for (int i = 0; i < kEstoiFft; ++i) {
      const size_t idx = f * kEstoiHop + i;
      if (idx < n) {
        const double v = win[i] * ref.samples[idx];
        acc += v * v;
      }
    }
    frame_energy[f] = acc;
    max_energy = std::max(max_energy, acc);
  }
  const double energy_floor =
      max_energy * std::pow(10.0, -kSilenceRangeDb / 10.0);
  std::vector<size_t> kept;
  for (size_t f = 0; f < total_frames; ++f)
    if (frame_energy[f] > energy_floor) kept.push_back(f);

  // >= 1 s of speech-active signal must remain.
  if (kept.size() * static_cast<size_t>(kEstoiHop) <
      static_cast<size_t>(kEstoiRate))
    throw Error(ErrorCode::kTooShort,
                "estoi: insufficient speech-active duration");

  const auto bins = band_bins();
  const size_t m = kept.size();
  std::vector<std::vector<double>> xr(kNumBands, std::vector<double>(m));
  std::vector<std::vector<double>> xe(kNumBands, std::vector<double>(m));
  for (size_t f = 0; f < m; ++f) {
    const auto &fr = sr.frames[kept[f]];
    const auto &fe = se.frames[kept[f]];
    for (int b = 0; b < kNumBands; ++b) {
      double ar = 0.0, ae = 0.0;
      for (int k : bins[b]) {
        ar += std::norm(fr[k]);
        ae += std::norm(fe[k]);
      }
      xr[b][f] = std::sqrt(ar);
      xe[b][f] = std::sqrt(ae);
    }
  }

  // Per 30-frame segment: doubly normalized band-by-frame matrices, scored
  // by the mean of framewise inner products.
  double total = 0.0;
  size_t n_segments = 0;
  std::vector<std::vector<double>> segr(kNumBands,
                                        std::vector<double>(kSegmentFrames));
  std::vector<std::vector<double>> sege(kNumBands,
                                        std::vector<double>(kSegmentFrames));
  for (size_t end = kSegmentFrames; end <= m; ++end) {
    for (int b = 0; b < kNumBands; ++b)
      for (int f = 0; f < kSegmentFrames; ++f) {
        segr[b][f] = xr[b][end - kSegmentFrames + f];
        sege[b][f] = xe[b][end - kSegmentFrames + f];
      }
    normalize_segment(segr);
    normalize_segment(sege);
    double d = 0.0;
    for (int b = 0; b < kNumBands; ++b)
      for (int f = 0; f < kSegmentFrames; ++f) d += segr[b][f] * sege[b][f];
    total += d / static_cast<double>(kSegmentFrames);
    ++n_segments;
  }
  return total / static_cast<double>(n_segments);
}

}  // namespace urgentkit
