// include/urgentkit/stft.h

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

#ifndef URGENTKIT_STFT_H_
#define URGENTKIT_STFT_H_

#include <complex>
#include <string>
#include <vector>

#include "urgentkit/types.h"

namespace urgentkit {

/// Complex STFT frames. frames[f][k] is frame f, bin k with
/// k in [0, fft_size/2] (real-input spectrum).
struct SpectralFrames {
  std::vector<std::vector<std::complex<double>>> frames;
  int fft_size = 0;
  int hop = 0;
  std::string window;
  int rate_hz = 0;

  size_t frame_count() const { return frames.size(); }
  size_t bin_count() const { return frames.empty() ? 0 : frames[0].size(); }
};

/// Periodic Hann window: w[n] = 0.5 - 0.5 cos(2 pi n / n_size).
std::vector<double> hann_window(int n_size);

/// Symmetric Hann window: w[n] = 0.5 - 0.5 cos(2 pi n / (n_size - 1)).
/// Used where exact mirror symmetry matters (LSD/MCD framing).
std::vector<double> symmetric_hann_window(int n_size);

/// STFT with the named window ("hann", "hann_sym" or "rect"). fft_size must
/// be a power of two >= 64, 0 < hop <= fft_size. Signals shorter than one
/// frame are zero-padded to a single frame.
SpectralFrames stft(const AudioSignal &signal, int fft_size, int hop,
                    const std::string &window);

/// Welch-averaged one-sided power spectrum (Hann, 50% overlap). Returns
/// fft_size/2 + 1 bin powers; bin k is centered at k * rate / fft_size Hz.
std::vector<double> welch_psd(const AudioSignal &signal, int fft_size = 4096);

}  // namespace urgentkit

#endif  // URGENTKIT_STFT_H_
