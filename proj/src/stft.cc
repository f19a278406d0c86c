// src/stft.cc

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

#include "urgentkit/stft.h"

#include <cmath>

#include "urgentkit/fft.h"

namespace urgentkit {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::vector<double> hann_window(int n_size) {
  std::vector<double> w(n_size);
  for (int n = 0; n < n_size; ++n)
    w[n] = 0.5 - 0.5 * std::cos(kTwoPi * n / n_size);
  return w;
}

std::vector<double> symmetric_hann_window(int n_size) {
  std::vector<double> w(n_size);
  for (int n = 0; n < n_size; ++n)
    w[n] = 0.5 - 0.5 * std::cos(kTwoPi * n / (n_size - 1));
  return w;
}

SpectralFrames stft(const AudioSignal &signal, int fft_size, int hop,
                    const std::string &window) {
  if (fft_size < 64 || (fft_size & (fft_size - 1)) != 0)
    throw Error(ErrorCode::kInvalidArgument,
                "stft: fft_size must be a power of two >= 64");
  if (hop <= 0 || hop > fft_size)
    throw Error(ErrorCode::kInvalidArgument,
                "stft: hop must satisfy 0 < hop <= fft_size");
  std::vector<double> w;
  if (window == "hann") {
    w = hann_window(fft_size);
  } else if (window == "hann_sym") {
    w = symmetric_hann_window(fft_size);
  } else if (window == "rect") {
    w.assign(fft_size, 1.0);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "stft: unknown window " + window);
  }

  const auto &x = signal.samples;
  const size_t len = x.size();
  const size_t n_frames =
      len >= static_cast<size_t>(fft_size)
          ? (len - fft_size) / hop + 1
          : 1;  // short signals are zero-padded to one frame

  SpectralFrames out;
  out.fft_size = fft_size;
  out.hop = hop;
  out.window = window;
  out.rate_hz = signal.rate_hz;
  out.frames.resize(n_frames);

#pragma omp parallel for schedule(static)
  for (long f = 0; f < static_cast<long>(n_frames); ++f) {
    std::vector<std::complex<double>> buf(fft_size);
    const size_t start = static_cast<size_t>(f) * hop;
    for (int n = 0; n < fft_size; ++n) {
      const size_t i = start + n;
      buf[n] = {i < len ? w[n] * x[i] : 0.0, 0.0};
    }
    fft_inplace(buf);
    buf.resize(fft_size / 2 + 1);
    out.frames[f] = std::move(buf);
  }
  return out;
}

std::vector<double> welch_psd(const AudioSignal &signal, int fft_size) {
  const int hop = fft_size / 2;
  SpectralFrames sf = stft(signal, fft_size, hop, "hann");
  std::vector<double> psd(sf.bin_count(), 0.0);
  for (const auto &frame : sf.frames)
    for (size_t k = 0; k < frame.size(); ++k) psd[k] += std::norm(frame[k]);
  const double inv = 1.0 / static_cast<double>(sf.frame_count());
  for (auto &p : psd) p *= inv;
  return psd;
}

}  // namespace urgentkit
