// src/fft.cc

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

#include "urgentkit/fft.h"

#include <cmath>

#include "urgentkit/types.h"

namespace urgentkit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// Twiddles computed per index with cos/sin (not by recurrence) to keep
// round-off at the eps level regardless of transform size.
void fill_twiddles(std::vector<std::complex<double>> &tw, size_t n,
                   bool inverse) {
  tw.resize(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (size_t j = 0; j < n / 2; ++j) {
    double a = sign * kTwoPi * static_cast<double>(j) / static_cast<double>(n);
    tw[j] = {std::cos(a), std::sin(a)};
  }
}

}  // namespace

size_t next_pow2(size_t n) {
  size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>> &a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Error(ErrorCode::kInvalidArgument,
                "fft: size must be a power of two");
  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  std::vector<std::complex<double>> tw;
  fill_twiddles(tw, n, inverse);
  for (size_t len = 2; len <= n; len <<= 1) {
    const size_t step = n / len;
    for (size_t i = 0; i < n; i += len) {
      for (size_t k = 0; k < len / 2; ++k) {
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * tw[k * step];
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto &z : a) z *= inv;
  }
}

std::vector<std::complex<double>> rfft(std::span<const double> x, size_t n) {
  std::vector<std::complex<double>> a(n);
  const size_t m = std::min(x.size(), n);
  for (size_t i = 0; i < m; ++i) a[i] = {x[i], 0.0};
  fft_inplace(a);
  a.resize(n / 2 + 1);
  return a;
}

std::vector<double> fft_convolve(std::span<const double> x,
                                 std::span<const double> h) {
  if (x.empty() || h.empty())
    throw Error(ErrorCode::kEmptyData, "fft_convolve: empty input");
  const size_t out_len = x.size() + h.size() - 1;
  const size_t n = next_pow2(out_len);
  std::vector<std::complex<double>> a(n), b(n);
  for (size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  for (size_t i = 0; i < h.size(); ++i) b[i] = {h[i], 0.0};
  fft_inplace(a);
  fft_inplace(b);
  for (size_t i = 0; i < n; ++i) a[i] *= b[i];
  fft_inplace(a, true);
  std::vector<double> out(out_len);
  for (size_t i = 0; i < out_len; ++i) out[i] = a[i].real();
  return out;
}

}  // namespace urgentkit
