// include/urgentkit/fft.h

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

#ifndef URGENTKIT_FFT_H_
#define URGENTKIT_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace urgentkit {

/// In-place radix-2 FFT. a.size() must be a power of two.
/// inverse=true applies the conjugate transform and divides by N.
void fft_inplace(std::vector<std::complex<double>> &a, bool inverse = false);

/// Real-input FFT: zero-pads x to n (power of two) and returns bins 0..n/2.
std::vector<std::complex<double>> rfft(std::span<const double> x, size_t n);

/// Full linear convolution (length |x| + |h| - 1) via zero-padded FFT.
std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h);

/// Smallest power of two >= n (and >= 1).
size_t next_pow2(size_t n);

}  // namespace urgentkit

#endif  // URGENTKIT_FFT_H_
