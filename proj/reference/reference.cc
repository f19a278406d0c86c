// reference/reference.cc

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

#include "reference.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace urgentkit::reference {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

std::vector<double> hann_sym(int n_size) {
  std::vector<double> w(n_size);
  for (int n = 0; n < n_size; ++n)
    w[n] = 0.5 - 0.5 * std::cos(kTwoPi * n / (n_size - 1));
  return w;
}

double sinc(double x) {
  if (std::fabs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

double bessel_i0(double x) {
  const double x2 = x / 2.0;
  double term = 1.0, sum = 1.0;
  int k = 1;
  double last;
  do {
    const double y = x2 / k;
    ++k;
    last = sum;
    term *= y * y;
    sum += term;
  } while (sum != last);
  return sum;
}

}  // namespace

std::vector<double> direct_convolve(std::span<const double> x,
                                    std::span<const double> h) {
  std::vector<double> out(x.size() + h.size() - 1, 0.0);
  for (size_t n = 0; n < out.size(); ++n) {
    double acc = 0.0;
    const size_t k_lo = n >= x.size() - 1 ? n - (x.size() - 1) : 0;
    const size_t k_hi = std::min(n, h.size() - 1);
    for (size_t k = k_lo; k <= k_hi; ++k) acc += x[n - k] * h[k];
    out[n] = acc;
  }
  return out;
}

std::vector<std::complex<double>> naive_dft(std::span<const double> x,
                                            size_t n) {
  // Literal DFT sum; the twiddle lookup keeps it usable on 2048-point
  // frames without changing the O(N^2) structure.
  std::vector<double> cos_tab(n), sin_tab(n);
  for (size_t j = 0; j < n; ++j) {
    cos_tab[j] = std::cos(kTwoPi * static_cast<double>(j) / n);
    sin_tab[j] = std::sin(kTwoPi * static_cast<double>(j) / n);
  }
  std::vector<std::complex<double>> out(n / 2 + 1);
  const size_t m = std::min(x.size(), n);
  for (size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const size_t idx = (k * i) % n;
      re += x[i] * cos_tab[idx];
      im -= x[i] * sin_tab[idx];
    }
    out[k] = {re, im};
  }
  return out;
}

double lsd_naive(const AudioSignal &ref, const AudioSignal &est) {
  constexpr int kFft = 2048, kHop = 512;
  constexpr double kFloor = 1e-10;
  const size_t n = std::min(ref.size(), est.size());
  if (n < kFft)
    throw Error(ErrorCode::kTooShort, "lsd_naive: too short");
  const std::vector<double> w = hann_sym(kFft);
  const size_t frames = (n - kFft) / kHop + 1;

  double total = 0.0;
  std::vector<double> fr(kFft), fe(kFft);
  for (size_t f = 0; f < frames; ++f) {
    for (int i = 0; i < kFft; ++i) {
      fr[i] = w[i] * ref.samples[f * kHop + i];
      fe[i] = w[i] * est.samples[f * kHop + i];
    }
    const auto sr = naive_dft(fr, kFft);
    const auto se = naive_dft(fe, kFft);
    double acc = 0.0;
    for (size_t k = 0; k < sr.size(); ++k) {
      const double pr = std::max(std::norm(sr[k]), kFloor);
      const double pe = std::max(std::norm(se[k]), kFloor);
      const double d = 10.0 * std::log10(pr / pe);
      acc += d * d;
    }
    total += std::sqrt(acc / static_cast<double>(sr.size()));
  }
  return total / static_cast<double>(frames);
}

double mcd_naive(const AudioSignal &ref, const AudioSignal &est) {
  const int rate = ref.rate_hz;
  const int frame_len = static_cast<int>(std::nearbyint(0.025 * rate));
  const int hop = static_cast<int>(std::nearbyint(0.010 * rate));
  const size_t n = std::min(ref.size(), est.size());
  if (n < static_cast<size_t>(frame_len))
    throw Error(ErrorCode::kTooShort, "mcd_naive: too short");
  size_t n_fft = 1;
  while (n_fft < static_cast<size_t>(frame_len)) n_fft <<= 1;
  const int n_bins = static_cast<int>(n_fft) / 2 + 1;
  constexpr int kBands = 80, kCoeffs = 13;

  // Explicit filterbank matrix (HTK mel scale, triangles to Nyquist).
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto imel = [](double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
  };
  std::vector<std::vector<double>> fb(kBands, std::vector<double>(n_bins, 0.0));
  const double mel_max = mel(rate / 2.0);
  for (int b = 0; b < kBands; ++b) {
    const double lo = imel(mel_max * b / (kBands + 1));
    const double mid = imel(mel_max * (b + 1) / (kBands + 1));
    const double hi = imel(mel_max * (b + 2) / (kBands + 1));
    for (int k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * rate / static_cast<double>(n_fft);
      if (f >= lo && f < mid) fb[b][k] = (f - lo) / std::max(mid - lo, 1e-12);
      else if (f >= mid && f < hi)
        fb[b][k] = (hi - f) / std::max(hi - mid, 1e-12);
    }
  }
  std::vector<std::vector<double>> dct(kCoeffs, std::vector<double>(kBands));
  for (int d = 1; d <= kCoeffs; ++d)
    for (int m = 0; m < kBands; ++m)
      dct[d - 1][m] = std::cos(kPi * d * (m + 0.5) / kBands);

  const std::vector<double> w = hann_sym(frame_len);
  const size_t frames = (n - frame_len) / hop + 1;
  const double scale = 10.0 / std::log(10.0);

  auto cepstrum = [&](const std::vector<double> &x, size_t start) {
    std::vector<double> frame(frame_len);
    for (int i = 0; i < frame_len; ++i) frame[i] = w[i] * x[start + i];
    const auto spec = naive_dft(frame, n_fft);
    std::vector<double> logmel(kBands);
    for (int b = 0; b < kBands; ++b) {
      double acc = 0.0;
      for (int k = 0; k < n_bins; ++k) acc += fb[b][k] * std::norm(spec[k]);
      logmel[b] = std::log(acc + 1e-10);
    }
    std::vector<double> c(kCoeffs);
    for (int d = 0; d < kCoeffs; ++d) {
      double acc = 0.0;
      for (int m = 0; m < kBands; ++m) acc += dct[d][m] * logmel[m];
      c[d] = acc;
    }
    return c;
  };

  double total = 0.0;
  for (size_t f = 0; f < frames; ++f) {
    const auto cr = cepstrum(ref.samples, f * hop);
    const auto ce = cepstrum(est.samples, f * hop);
    double acc = 0.0;
    for (int d = 0; d < kCoeffs; ++d) acc += (cr[d] - ce[d]) * (cr[d] - ce[d]);
    total += scale * std::sqrt(2.0 * acc);
  }
  return total / static_cast<double>(frames);
}

int edit_distance_recursive(std::span<const uint32_t> a,
                            std::span<const uint32_t> b) {
  if (a.empty()) return static_cast<int>(b.size());
  if (b.empty()) return static_cast<int>(a.size());
  const int del = edit_distance_recursive(a.subspan(1), b) + 1;
  const int ins = edit_distance_recursive(a, b.subspan(1)) + 1;
  const int sub =
      edit_distance_recursive(a.subspan(1), b.subspan(1)) + (a[0] != b[0]);
  return std::min({del, ins, sub});
}

AudioSignal resample_direct(const AudioSignal &signal, int target_hz) {
  if (target_hz == signal.rate_hz) return signal;
  const int g = std::gcd(signal.rate_hz, target_hz);
  const int l = target_hz / g;
  const int m = signal.rate_hz / g;
  const int big = std::max(l, m);
  const long half = 32L * big;
  const double fc = 0.95 * 0.5 / big;
  const double beta = 14.77;
  const double i0_beta = bessel_i0(beta);

  const long in_len = static_cast<long>(signal.size());
  const long out_len = static_cast<long>(
      std::llround(static_cast<double>(in_len) * target_hz / signal.rate_hz));
  AudioSignal out;
  out.rate_hz = target_hz;
  out.samples.assign(out_len, 0.0);

  // Evaluate the windowed sinc at every contributing input sample, walking
  // the inputs in ascending order.
  for (long n = 0; n < out_len; ++n) {
    const long t = n * m;  // output instant on the upsampled grid
    const long i_lo = std::max(0L, (t - half + l - 1) / l);
    const long i_hi = std::min(in_len - 1, (t + half) / l);
    double acc = 0.0;
    for (long i = i_lo; i <= i_hi; ++i) {
      const double tau = static_cast<double>(t - i * l);
      const double k = tau / static_cast<double>(half);
      if (k < -1.0 || k > 1.0) continue;
      const double window = bessel_i0(beta * std::sqrt(1.0 - k * k)) / i0_beta;
      acc += signal.samples[i] * l * 2.0 * fc * sinc(2.0 * fc * tau) * window;
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace urgentkit::reference
