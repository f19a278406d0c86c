// reference/reference.h

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

#ifndef URGENTKIT_REFERENCE_REFERENCE_H_
#define URGENTKIT_REFERENCE_REFERENCE_H_

// Serial, brute-force counterparts of the production kernels. They share no
// code with the fast paths (naive DFT instead of the radix-2 FFT, direct
// summation instead of polyphase decomposition) so the test suite can use
// them as independent oracles, and the benchmark target uses them as the
// serial baselines.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "urgentkit/types.h"

namespace urgentkit::reference {

/// O(N*K) direct convolution, full length N + K - 1.
std::vector<double> direct_convolve(std::span<const double> x,
                                    std::span<const double> h);

/// O(N^2) DFT of a real frame, bins 0..n/2 of an n-point transform.
std::vector<std::complex<double>> naive_dft(std::span<const double> x,
                                            size_t n);

/// LSD recomputed with the naive DFT and an explicit frame/bin double loop.
double lsd_naive(const AudioSignal &ref, const AudioSignal &est);

/// MCD recomputed with the naive DFT and explicit filterbank and DCT
/// matrix products.
double mcd_naive(const AudioSignal &ref, const AudioSignal &est);

/// Exhaustive-recursion Levenshtein distance; only usable for short inputs.
int edit_distance_recursive(std::span<const uint32_t> a,
                            std::span<const uint32_t> b);

/// Direct windowed-sinc interpolation at each output instant, evaluating
/// the same continuous-time kernel as the polyphase resampler without the
/// phase decomposition.
AudioSignal resample_direct(const AudioSignal &signal, int target_hz);

}  // namespace urgentkit::reference

#endif  // URGENTKIT_REFERENCE_REFERENCE_H_
