// bench/bench_kernels.cc

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

// Production kernels (OpenMP + FFT fast paths) against their serial
// reference counterparts. Run with --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include "reference.h"
#include "urgentkit/degrade.h"
#include "urgentkit/fft.h"
#include "urgentkit/metrics.h"
#include "urgentkit/resample.h"
#include "urgentkit/rng.h"
#include "urgentkit/stft.h"

using namespace urgentkit;

namespace {

AudioSignal noise_signal(int rate, double seconds, uint64_t seed) {
  Rng rng(seed);
  AudioSignal out;
  out.rate_hz = rate;
  out.samples.resize(static_cast<size_t>(rate * seconds));
  for (double &v : out.samples) v = 0.3 * rng.normal();
  return out;
}

void bm_resample_polyphase(benchmark::State &state) {
  const AudioSignal x = noise_signal(48000, 2.0, 1);
  for (auto _ : state) {
    AudioSignal y = resample(x, 16000);
    benchmark::DoNotOptimize(y.samples.data());
  }
}
BENCHMARK(bm_resample_polyphase)->Unit(benchmark::kMillisecond);

void bm_resample_direct_serial(benchmark::State &state) {
  const AudioSignal x = noise_signal(48000, 2.0, 1);
  for (auto _ : state) {
    AudioSignal y = reference::resample_direct(x, 16000);
    benchmark::DoNotOptimize(y.samples.data());
  }
}
BENCHMARK(bm_resample_direct_serial)->Unit(benchmark::kMillisecond);

void bm_convolve_fft(benchmark::State &state) {
  const AudioSignal x = noise_signal(16000, 2.0, 2);
  const AudioSignal h = noise_signal(16000, 0.25, 3);
  for (auto _ : state) {
    auto y = fft_convolve(x.samples, h.samples);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_convolve_fft)->Unit(benchmark::kMillisecond);

void bm_convolve_direct_serial(benchmark::State &state) {
  const AudioSignal x = noise_signal(16000, 2.0, 2);
  const AudioSignal h = noise_signal(16000, 0.25, 3);
  for (auto _ : state) {
    auto y = reference::direct_convolve(x.samples, h.samples);
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(bm_convolve_direct_serial)->Unit(benchmark::kMillisecond);

void bm_stft_omp(benchmark::State &state) {
  const AudioSignal x = noise_signal(48000, 4.0, 4);
  for (auto _ : state) {
    SpectralFrames f = stft(x, 2048, 512, "hann");
    benchmark::DoNotOptimize(f.frames.data());
  }
}
BENCHMARK(bm_stft_omp)->Unit(benchmark::kMillisecond);

void bm_lsd_fast(benchmark::State &state) {
  const AudioSignal a = noise_signal(16000, 1.0, 5);
  const AudioSignal b = noise_signal(16000, 1.0, 6);
  for (auto _ : state) benchmark::DoNotOptimize(lsd(a, b));
}
BENCHMARK(bm_lsd_fast)->Unit(benchmark::kMillisecond);

void bm_lsd_naive_serial(benchmark::State &state) {
  const AudioSignal a = noise_signal(16000, 1.0, 5);
  const AudioSignal b = noise_signal(16000, 1.0, 6);
  for (auto _ : state) benchmark::DoNotOptimize(reference::lsd_naive(a, b));
}
BENCHMARK(bm_lsd_naive_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
