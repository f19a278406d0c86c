// src/resample.cc

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

#include "urgentkit/resample.h"

#include <cmath>
#include <numeric>

namespace urgentkit {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
// Kaiser beta for ~140 dB stopband attenuation.
constexpr double kKaiserBeta = 14.77;
constexpr int kTapsPerPhase = 64;
// Cutoff as a fraction of the lower Nyquist; leaves a transition band that
// stays inside [0.45, 0.55] of the lower rate.
constexpr double kCutoffRatio = 0.95;

/* Normalized sinc:
 *   sinc(x) = { 1,                  x = 0
 *             { sin(pi x)/(pi x),   otherwise.
 */
double sinc(double x) {
  if (std::fabs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

/* Zero-order modified Bessel function of the first kind,
 *   I_0(x) = sum_k ((x/2)^k / k!)^2,
 * summed until the terms stop contributing.
 */
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

double kaiser(double beta, double k) {
  if (k < -1.0 || k > 1.0) return 0.0;
  return bessel_i0(beta * std::sqrt(1.0 - k * k)) / bessel_i0(beta);
}

}  // namespace

std::vector<double> resample_filter(int upsample_l, int downsample_m) {
  const int big = std::max(upsample_l, downsample_m);
  const int half = (kTapsPerPhase / 2) * big;
  const int n_taps = 2 * half + 1;
  // Ideal lowpass at the lower Nyquist (in cycles/sample of the upsampled
  // rate), backed off by the rolloff so the transition band clears it.
  const double fc = kCutoffRatio * 0.5 / big;
  std::vector<double> h(n_taps);
  for (int j = 0; j < n_taps; ++j) {
    const int n = j - half;
    h[j] = upsample_l * 2.0 * fc * sinc(2.0 * fc * n) *
           kaiser(kKaiserBeta, static_cast<double>(n) / half);
  }
  return h;
}

AudioSignal resample(const AudioSignal &signal, int target_hz) {
  if (target_hz <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "resample: non-positive target rate");
  if (target_hz < 4000)
    throw Error(ErrorCode::kInvalidArgument,
                "resample: target rate must be >= 4000 Hz");
  check_signal(signal, "resample");
  if (target_hz == signal.rate_hz) return signal;

  const int g = std::gcd(signal.rate_hz, target_hz);
  const int l = target_hz / g;   // upsampling factor
  const int m = signal.rate_hz / g;  // downsampling factor
  const std::vector<double> h = resample_filter(l, m);
  const long half = (static_cast<long>(h.size()) - 1) / 2;

  const auto &x = signal.samples;
  const long in_len = static_cast<long>(x.size());
  const long out_len = static_cast<long>(
      std::llround(static_cast<double>(in_len) * target_hz / signal.rate_hz));

  AudioSignal out;
  out.rate_hz = target_hz;
  out.samples.assign(out_len, 0.0);

  // Polyphase evaluation of the zero-stuffed convolution: output n sits at
  // upsampled index n*m; the +half term centers the linear-phase filter so
  // the output is time-aligned with the input.
#pragma omp parallel for schedule(static)
  for (long n = 0; n < out_len; ++n) {
    const long t = n * m + half;
    const long phase = t % l;
    const long base = t / l;
    double acc = 0.0;
    for (long j = phase, k = 0; j < static_cast<long>(h.size());
         j += l, ++k) {
      const long i = base - k;
      if (i >= 0 && i < in_len) acc += h[j] * x[i];
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace urgentkit
