// tests/test_degrade.cc

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

#include <doctest.h>

#include <cstdlib>

#include "reference.h"
#include "test_util.h"
#include "urgentkit/degrade.h"
#include "urgentkit/stft.h"

using namespace urgentkit;
using namespace urgentkit::testutil;

TEST_CASE("mix_at_snr hits the requested SNR exactly") {
  const AudioSignal speech = synth_speech(16000, 1.0, 1);
  const AudioSignal noise = white_noise(16000, 1.0, 2);

  SUBCASE("equal-power inputs at 0 dB give unit gain") {
    AudioSignal eq_noise = noise;
    const double scale =
        std::sqrt(signal_power(speech) / signal_power(noise));
    for (double &v : eq_noise.samples) v *= scale;
    const MixResult r = mix_at_snr(speech, eq_noise, 0.0, 9);
    CHECK(std::fabs(r.noise_gain - 1.0) < 1e-12);
    CHECK(std::fabs(r.realized_snr_db) < 1e-6);
  }

  SUBCASE("realized SNR recomputed from outputs") {
    for (double snr : {-5.0, 0.0, 10.0, 20.0}) {
      const MixResult r = mix_at_snr(speech, noise, snr, 9);
      const double measured = 10.0 * std::log10(signal_power(speech) /
                                                signal_power(r.scaled_noise));
      CHECK(std::fabs(measured - snr) < 1e-6);
      // mixture = speech + scaled noise (up to the recorded rescue gain)
      for (size_t i = 0; i < speech.size(); i += 997) {
        const double expect =
            (speech.samples[i] + r.scaled_noise.samples[i]) * r.rescue_gain;
        CHECK(std::fabs(r.mixture.samples[i] - expect) < 1e-12);
      }
    }
  }

  SUBCASE("short noise is tiled deterministically") {
    const AudioSignal snippet = white_noise(16000, 0.2, 3);
    const MixResult a = mix_at_snr(speech, snippet, 5.0, 42);
    const MixResult b = mix_at_snr(speech, snippet, 5.0, 42);
    CHECK(a.noise_offset == b.noise_offset);
    CHECK(a.mixture.samples == b.mixture.samples);
    const MixResult c = mix_at_snr(speech, snippet, 5.0, 43);
    CHECK(a.mixture.samples != c.mixture.samples);
  }

  SUBCASE("peak rescue caps the mixture at 0.99") {
    AudioSignal loud = speech;
    for (double &v : loud.samples) v *= 1.9;
    const MixResult r = mix_at_snr(loud, noise, -10.0, 9);
    CHECK(r.rescue_gain < 1.0);
    CHECK(peak_abs(r.mixture) <= 0.99 + 1e-12);
  }

  SUBCASE("errors") {
    const AudioSignal zeros(std::vector<double>(16000, 0.0), 16000);
    CHECK_THROWS_WITH_AS(mix_at_snr(speech, zeros, 0.0, 1),
                         doctest::Contains("silent noise"), Error);
    CHECK_THROWS_WITH_AS(mix_at_snr(zeros, noise, 0.0, 1),
                         doctest::Contains("silent speech"), Error);
    const AudioSignal other = white_noise(8000, 1.0, 2);
    CHECK_THROWS_AS(mix_at_snr(speech, other, 0.0, 1), Error);
  }
}

TEST_CASE("gen_wind_noise spectral and determinism properties") {
  const AudioSignal wind = gen_wind_noise(4.0, 16000, 0.5, 77);
  CHECK(wind.rate_hz == 16000);
  CHECK(wind.samples.size() == 64000);
  CHECK(peak_abs(wind) == doctest::Approx(0.9));

  SUBCASE(">= 90% of spectral energy below 500 Hz") {
    const auto psd = welch_psd(wind, 4096);
    double below = 0.0, total = 0.0;
    for (size_t k = 0; k < psd.size(); ++k) {
      const double f = static_cast<double>(k) * 16000.0 / 4096.0;
      total += psd[k];
      if (f < 500.0) below += psd[k];
    }
    CHECK(below / total >= 0.9);
  }

  SUBCASE("same seed is bit-identical, different seed differs") {
    const AudioSignal again = gen_wind_noise(4.0, 16000, 0.5, 77);
    CHECK(again.samples == wind.samples);
    const AudioSignal other = gen_wind_noise(4.0, 16000, 0.5, 78);
    CHECK(other.samples != wind.samples);
  }

  SUBCASE("gustiness 1 has strictly more envelope variation than 0") {
    for (uint64_t seed : {5u, 6u, 7u}) {
      auto env_cv = [](const AudioSignal &x) {
        // envelope via one-pole lowpass of |x| at 8 Hz
        const double a = std::exp(-2.0 * kPi * 8.0 / x.rate_hz);
        double state = 0.0, sum = 0.0, sum2 = 0.0;
        std::vector<double> env(x.samples.size());
        for (size_t i = 0; i < x.samples.size(); ++i) {
          state = a * state + (1.0 - a) * std::fabs(x.samples[i]);
          env[i] = state;
        }
        for (double v : env) {
          sum += v;
          sum2 += v * v;
        }
        const double mean = sum / env.size();
        const double var = sum2 / env.size() - mean * mean;
        return std::sqrt(std::max(0.0, var)) / mean;
      };
      const double cv0 = env_cv(gen_wind_noise(6.0, 8000, 0.0, seed));
      const double cv1 = env_cv(gen_wind_noise(6.0, 8000, 1.0, seed));
      CHECK(cv1 > cv0);
    }
  }

  CHECK_THROWS_AS(gen_wind_noise(0.0, 16000, 0.5, 1), Error);
  CHECK_THROWS_AS(gen_wind_noise(-1.0, 16000, 0.5, 1), Error);
}

TEST_CASE("convolve_rir alignment and correctness") {
  const AudioSignal speech = synth_speech(16000, 0.5, 4);

  SUBCASE("unit impulse RIR is the identity") {
    AudioSignal rir(std::vector<double>{1.0}, 16000);
    const ReverbResult r = convolve_rir(speech, rir);
    REQUIRE(r.reverberant.samples.size() == speech.samples.size());
    for (size_t i = 0; i < speech.size(); ++i)
      CHECK(std::fabs(r.reverberant.samples[i] - speech.samples[i]) < 1e-9);
    CHECK(r.reference.samples == speech.samples);
  }

  SUBCASE("delayed scaled impulse is re-aligned to lag zero") {
    AudioSignal rir(std::vector<double>(128, 0.0), 16000);
    rir.samples[100] = 0.5;
    const ReverbResult r = convolve_rir(speech, rir);
    CHECK(r.direct_path_index == 100);
    for (size_t i = 0; i < speech.size(); i += 331)
      CHECK(std::fabs(r.reverberant.samples[i] - 0.5 * speech.samples[i]) <
            1e-9);
  }

  SUBCASE("matches direct O(N*K) convolution") {
    AudioSignal rir(std::vector<double>{0.9, 0.0, 0.0, 0.4}, 16000);
    const ReverbResult r = convolve_rir(speech, rir);
    const auto full =
        reference::direct_convolve(speech.samples, rir.samples);
    for (size_t i = 0; i < speech.size(); ++i)
      CHECK(std::fabs(r.reverberant.samples[i] - full[i]) < 1e-9);
  }

  SUBCASE("errors") {
    AudioSignal zero_rir(std::vector<double>(16, 0.0), 16000);
    CHECK_THROWS_AS(convolve_rir(speech, zero_rir), Error);
    AudioSignal wrong_rate(std::vector<double>{1.0}, 8000);
    CHECK_THROWS_AS(convolve_rir(speech, wrong_rate), Error);
  }
}

TEST_CASE("clip thresholds and properties") {
  SUBCASE("ratio 1 is the identity") {
    const AudioSignal x = white_noise(8000, 0.1, 5);
    CHECK(clip(x, 1.0).samples == x.samples);
  }

  SUBCASE("threshold follows the actual peak") {
    AudioSignal x(std::vector<double>{0.8, -0.6, 0.2}, 8000);
    const AudioSignal y = clip(x, 0.5);
    CHECK(peak_abs(y) == 0.4);
    CHECK(y.samples[0] == 0.4);
    CHECK(y.samples[1] == -0.4);
    CHECK(y.samples[2] == 0.2);
  }

  SUBCASE("ramp alters exactly the samples above threshold") {
    AudioSignal ramp;
    ramp.rate_hz = 8000;
    for (int i = 0; i <= 200; ++i) ramp.samples.push_back(-1.0 + 0.01 * i);
    const AudioSignal y = clip(ramp, 0.25);
    const double t = 0.25 * peak_abs(ramp);
    for (size_t i = 0; i < ramp.samples.size(); ++i) {
      if (std::fabs(ramp.samples[i]) > t)
        CHECK(y.samples[i] != ramp.samples[i]);
      else
        CHECK(y.samples[i] == ramp.samples[i]);
    }
  }

  SUBCASE("all-zero input passes through") {
    AudioSignal zeros(std::vector<double>(64, 0.0), 8000);
    CHECK(clip(zeros, 0.5).samples == zeros.samples);
  }

  SUBCASE("invalid ratios") {
    const AudioSignal x = white_noise(8000, 0.05, 5);
    CHECK_THROWS_AS(clip(x, 0.0), Error);
    CHECK_THROWS_AS(clip(x, -0.5), Error);
    CHECK_THROWS_AS(clip(x, 1.5), Error);
  }

  SUBCASE("hard limiting at a fixed threshold is exactly idempotent") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
      AudioSignal x = white_noise(8000, 0.05, 100 + trial);
      const double ratio = rng.uniform(0.1, 0.9);
      const AudioSignal once = clip(x, ratio);
      const double t = ratio * peak_abs(x);
      CHECK(peak_abs(once) <= t);
      const AudioSignal twice = clip_abs(once, t);
      CHECK(twice.samples == once.samples);
    }
  }
}

TEST_CASE("bandlimit removes the stopband and keeps the passband") {
  SUBCASE("white noise at 48k, target 8k") {
    const AudioSignal x = white_noise(48000, 1.0, 21);
    const AudioSignal y = bandlimit(x, 8000);
    CHECK(y.samples.size() == x.samples.size());
    CHECK(y.rate_hz == 48000);
    const auto psd = welch_psd(y, 4096);
    double pass = 0.0, stop_max = 0.0;
    size_t pass_n = 0;
    for (size_t k = 0; k < psd.size(); ++k) {
      const double f = static_cast<double>(k) * 48000.0 / 4096.0;
      if (f > 100.0 && f < 3400.0) {
        pass += psd[k];
        ++pass_n;
      }
      if (f >= 4400.0) stop_max = std::max(stop_max, psd[k]);
    }
    pass /= static_cast<double>(pass_n);
    CHECK(10.0 * std::log10(stop_max / pass) <= -60.0);
  }

  SUBCASE("1 kHz sine amplitude within 0.1 dB") {
    const AudioSignal x = sine(1000.0, 48000, 1.0);
    const AudioSignal y = bandlimit(x, 8000);
    double acc = 0.0;
    size_t n = 0;
    for (size_t i = 6000; i + 6000 < y.samples.size(); ++i) {
      acc += y.samples[i] * y.samples[i];
      ++n;
    }
    const double amp = std::sqrt(2.0 * acc / static_cast<double>(n));
    CHECK(std::fabs(20.0 * std::log10(amp)) < 0.1);
  }

  SUBCASE("approximate idempotence") {
    const AudioSignal x = white_noise(48000, 0.6, 22);
    const AudioSignal once = bandlimit(x, 8000);
    const AudioSignal twice = bandlimit(once, 8000);
    const double delta =
        10.0 * std::log10(signal_power(twice) / signal_power(once));
    CHECK(std::fabs(delta) < 0.5);
  }

  SUBCASE("errors") {
    const AudioSignal x = white_noise(48000, 0.1, 23);
    CHECK_THROWS_AS(bandlimit(x, 48000), Error);
    CHECK_THROWS_AS(bandlimit(x, 96000), Error);
    CHECK_THROWS_AS(bandlimit(x, 12345), Error);  // not a challenge SF
  }
}

TEST_CASE("codec_external round-trips through command templates") {
  TempDir dir("codec");
  CodecTable table;
  table["copy"] = {"cp {in} {out}", "cp {in} {out}", "wav"};
  table["broken"] = {"false", "false", "bin"};

  AudioSignal x = synth_speech(16000, 0.3, 6);
  for (double &v : x.samples) v = static_cast<float>(v);

  SUBCASE("identity template preserves float32 samples") {
    const CodecResult r =
        codec_external(x, "copy", 64, table, dir.path() / "w");
    REQUIRE(r.signal.samples.size() == x.samples.size());
    CHECK(r.signal.samples == x.samples);
    CHECK(r.commands.size() == 2);
    // temp files cleaned up
    CHECK(!std::filesystem::exists(dir.path() / "w" / "codec_in.wav"));
  }

  SUBCASE("missing codec id is a configuration error naming it") {
    CHECK_THROWS_WITH_AS(
        codec_external(x, "opus", 64, table, dir.path() / "w"),
        doctest::Contains("opus"), Error);
  }

  SUBCASE("failing command is a hard error") {
    try {
      codec_external(x, "broken", 64, table, dir.path() / "w");
      FAIL("expected error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kExternalCommand);
    }
  }

  SUBCASE("lossy mp3 round trip when an encoder is present") {
    const bool have_ffmpeg =
        std::system("command -v ffmpeg >/dev/null 2>&1") == 0;
    if (!have_ffmpeg) {
      MESSAGE("ffmpeg not found; skipping real-codec test");
      return;
    }
    CodecTable mp3;
    mp3["mp3"] = {
        "ffmpeg -loglevel error -y -i {in} -b:a {bitrate}k {out}",
        "ffmpeg -loglevel error -y -i {in} {out}", "mp3"};
    const AudioSignal sp = synth_speech(16000, 1.0, 7);
    const CodecResult r = codec_external(sp, "mp3", 64, mp3, dir.path() / "m");
    REQUIRE(r.signal.samples.size() == sp.samples.size());
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < sp.size(); ++i) {
      dot += sp.samples[i] * r.signal.samples[i];
      na += sp.samples[i] * sp.samples[i];
      nb += r.signal.samples[i] * r.signal.samples[i];
    }
    CHECK(dot / std::sqrt(na * nb) > 0.8);
  }
}

TEST_CASE("packet_loss chain semantics") {
  const AudioSignal x = white_noise(16000, 1.0, 31);

  SUBCASE("p = 0 is the identity with an all-false mask") {
    const PacketLossResult r = packet_loss(x, 0.0, 1.0, 20.0, 1);
    CHECK(r.output.samples == x.samples);
    for (bool lost : r.loss_mask) CHECK(!lost);
  }

  SUBCASE("p = q = 1 alternates kept/lost from the second packet") {
    const PacketLossResult r = packet_loss(x, 1.0, 1.0, 20.0, 1);
    // start state is good, so packet 1 is kept; every transition flips
    bool expected = false;
    for (size_t k = 0; k < r.loss_mask.size(); ++k) {
      CHECK(r.loss_mask[k] == expected);
      expected = !expected;
    }
  }

  SUBCASE("kept samples are bit-identical to the input") {
    const PacketLossResult r = packet_loss(x, 0.3, 0.3, 20.0, 5);
    const size_t packet = 320;  // 20 ms at 16 kHz
    for (size_t k = 0; k < r.loss_mask.size(); ++k) {
      if (r.loss_mask[k]) continue;
      for (size_t i = k * packet;
           i < std::min((k + 1) * packet, x.samples.size()); ++i)
        CHECK(r.output.samples[i] == x.samples[i]);
    }
  }

  SUBCASE("lost runs are zero outside the 1 ms ramps") {
    const PacketLossResult r = packet_loss(x, 0.5, 0.5, 20.0, 5);
    const size_t packet = 320, ramp = 16;
    for (size_t k = 0; k < r.loss_mask.size(); ++k) {
      if (!r.loss_mask[k]) continue;
      const bool prev_lost = k > 0 && r.loss_mask[k - 1];
      const bool next_lost =
          k + 1 < r.loss_mask.size() && r.loss_mask[k + 1];
      const size_t a = k * packet + (prev_lost ? 0 : ramp);
      const size_t b = std::min((k + 1) * packet, x.samples.size()) -
                       (next_lost ? 0 : ramp);
      for (size_t i = a; i < b; ++i) CHECK(r.output.samples[i] == 0.0);
    }
  }

  SUBCASE("empirical loss rate approaches p / (p + q)") {
    // 1e5 packets of one sample each via packet_ms = 0.125 at 8 kHz
    AudioSignal longer;
    longer.rate_hz = 8000;
    longer.samples.assign(100000, 0.5);
    const PacketLossResult r = packet_loss(longer, 0.05, 0.5, 0.125, 77);
    REQUIRE(r.loss_mask.size() == 100000);
    double lost = 0.0;
    for (bool b : r.loss_mask) lost += b;
    const double rate = lost / static_cast<double>(r.loss_mask.size());
    CHECK(std::fabs(rate - 0.05 / 0.55) < 0.01);
  }

  SUBCASE("invalid parameters") {
    CHECK_THROWS_AS(packet_loss(x, -0.1, 0.5, 20.0, 1), Error);
    CHECK_THROWS_AS(packet_loss(x, 1.1, 0.5, 20.0, 1), Error);
    CHECK_THROWS_AS(packet_loss(x, 0.5, 0.0, 20.0, 1), Error);
    CHECK_THROWS_AS(packet_loss(x, 0.5, 0.5, 0.0, 1), Error);
  }
}

TEST_CASE("sample_chain follows the inclusion and cap rules") {
  ChainSamplerConfig config;
  config.master_seed = 101;
  config.codec_choices = {"mp3"};

  SUBCASE("all probabilities zero leaves just the mandatory noise") {
    config.wind_prob = 0.0;
    config.reverb_prob = config.clip_prob = config.bandwidth_prob =
        config.codec_prob = config.packet_loss_prob = 0.0;
    const DegradationChain chain = sample_chain(config, "utt1");
    REQUIRE(chain.steps.size() == 1);
    CHECK(chain.steps[0].kind == StepKind::kAdditiveNoise);
  }

  SUBCASE("all probabilities one caps at five steps, codec dropped first") {
    config.wind_prob = 0.0;
    config.reverb_prob = config.clip_prob = config.bandwidth_prob =
        config.codec_prob = config.packet_loss_prob = 1.0;
    const DegradationChain chain = sample_chain(config, "utt1", 48000);
    REQUIRE(chain.steps.size() == 5);
    CHECK(chain.steps[0].kind == StepKind::kReverberation);
    CHECK(chain.steps[1].kind == StepKind::kAdditiveNoise);
    CHECK(chain.steps[2].kind == StepKind::kClipping);
    CHECK(chain.steps[3].kind == StepKind::kBandwidthLimitation);
    CHECK(chain.steps[4].kind == StepKind::kPacketLoss);
  }

  SUBCASE("wind_prob selects the wind step") {
    config.wind_prob = 1.0;
    const DegradationChain chain = sample_chain(config, "utt2");
    bool has_wind = false;
    for (const auto &s : chain.steps)
      if (s.kind == StepKind::kWindNoise) has_wind = true;
    CHECK(has_wind);
  }

  SUBCASE("same (master_seed, utterance_id) is reproducible") {
    const DegradationChain a = sample_chain(config, "utt3", 48000);
    const DegradationChain b = sample_chain(config, "utt3", 48000);
    REQUIRE(a.steps.size() == b.steps.size());
    for (size_t i = 0; i < a.steps.size(); ++i) {
      CHECK(a.steps[i].kind == b.steps[i].kind);
      CHECK(a.steps[i].seed == b.steps[i].seed);
      CHECK(a.steps[i].snr_db == b.steps[i].snr_db);
    }
  }

  SUBCASE("bandwidth targets below the utterance rate only") {
    config.bandwidth_prob = 1.0;
    const DegradationChain chain = sample_chain(config, "utt4", 8000);
    for (const auto &s : chain.steps)
      CHECK(s.kind != StepKind::kBandwidthLimitation);
    const DegradationChain chain48 = sample_chain(config, "utt4", 48000);
    bool has_bw = false;
    for (const auto &s : chain48.steps)
      if (s.kind == StepKind::kBandwidthLimitation) {
        has_bw = true;
        CHECK(s.bandwidth_hz < 48000);
      }
    CHECK(has_bw);
  }

  SUBCASE("parameters come from their configured ranges") {
    config.clip_prob = 1.0;
    for (int i = 0; i < 50; ++i) {
      const DegradationChain chain =
          sample_chain(config, "utt" + std::to_string(i), 16000);
      for (const auto &s : chain.steps) {
        if (s.kind == StepKind::kAdditiveNoise) {
          CHECK(s.snr_db >= config.snr_lo_db);
          CHECK(s.snr_db <= config.snr_hi_db);
        }
        if (s.kind == StepKind::kClipping) {
          CHECK(s.clip_ratio >= config.clip_lo);
          CHECK(s.clip_ratio <= config.clip_hi);
        }
      }
    }
  }

  SUBCASE("invalid config is rejected") {
    config.clip_lo = 0.0;
    CHECK_THROWS_AS(sample_chain(config, "x"), Error);
  }
}

TEST_CASE("apply_chain composes steps in canonical order") {
  const AudioSignal clean = synth_speech(16000, 1.0, 9);
  const AudioSignal noise = white_noise(16000, 1.2, 10);
  AudioSignal rir(std::vector<double>(64, 0.0), 16000);
  rir.samples[0] = 1.0;
  rir.samples[40] = 0.3;

  ChainResources resources;
  resources.noise = &noise;
  resources.rir = &rir;
  resources.noise_id = "n1";
  resources.rir_id = "r1";

  SUBCASE("identity clipping step leaves the input untouched") {
    DegradationChain chain;
    chain.utterance_id = "u";
    DegradationStep step;
    step.kind = StepKind::kClipping;
    step.clip_ratio = 1.0;
    chain.steps.push_back(step);
    const ApplyResult r = apply_chain(clean, chain, resources);
    CHECK(r.degraded.samples == clean.samples);
    CHECK(r.reference.samples == clean.samples);
  }

  SUBCASE("noise + clipping equals the manual composition") {
    DegradationChain chain;
    chain.utterance_id = "u";
    DegradationStep noise_step;
    noise_step.kind = StepKind::kAdditiveNoise;
    noise_step.snr_db = 0.0;
    noise_step.seed = 55;
    DegradationStep clip_step;
    clip_step.kind = StepKind::kClipping;
    clip_step.clip_ratio = 0.5;
    chain.steps = {noise_step, clip_step};

    const ApplyResult r = apply_chain(clean, chain, resources);
    const MixResult mixed = mix_at_snr(clean, noise, 0.0, 55);
    const AudioSignal expect = clip(mixed.mixture, 0.5);
    REQUIRE(r.degraded.samples.size() == expect.samples.size());
    for (size_t i = 0; i < expect.size(); ++i)
      CHECK(r.degraded.samples[i] == expect.samples[i]);
  }

  SUBCASE("five-step chain is bit-reproducible") {
    ChainSamplerConfig config;
    config.master_seed = 7;
    config.wind_prob = 0.0;
    config.reverb_prob = config.clip_prob = config.bandwidth_prob =
        config.packet_loss_prob = 1.0;
    config.codec_prob = 0.0;
    const DegradationChain chain = sample_chain(config, "utt", 16000);
    REQUIRE(chain.steps.size() == 5);
    const ApplyResult a = apply_chain(clean, chain, resources);
    const ApplyResult b = apply_chain(clean, chain, resources);
    CHECK(a.degraded.samples == b.degraded.samples);
    CHECK(a.reference.samples == b.reference.samples);
    CHECK(a.degraded.samples.size() == a.reference.samples.size());
    CHECK(a.degraded.rate_hz == a.reference.rate_hz);
    CHECK(a.metadata.steps.size() == 5);
  }

  SUBCASE("early-reflections reference mode") {
    DegradationChain chain;
    chain.utterance_id = "u";
    DegradationStep step;
    step.kind = StepKind::kReverberation;
    chain.steps = {step};

    ChainResources early = resources;
    early.reverb_reference_early_ms = 50.0;
    const ApplyResult r = apply_chain(clean, chain, early);
    // direct path is tap 0, so the expected reference uses the RIR cut at
    // 50 ms = 800 samples (covers the whole 64-tap RIR here)
    const ReverbResult expect = convolve_rir(clean, rir);
    REQUIRE(r.reference.samples.size() == clean.samples.size());
    for (size_t i = 0; i < clean.size(); i += 499)
      CHECK(r.reference.samples[i] ==
            doctest::Approx(expect.reverberant.samples[i]).epsilon(1e-12));
    // default mode keeps the dry reference
    const ApplyResult dry = apply_chain(clean, chain, resources);
    CHECK(dry.reference.samples == clean.samples);
  }

  SUBCASE("missing resources fail with the step kind attached") {
    DegradationChain chain;
    chain.utterance_id = "u";
    DegradationStep step;
    step.kind = StepKind::kAdditiveNoise;
    chain.steps = {step};
    ChainResources empty;
    CHECK_THROWS_WITH_AS(apply_chain(clean, chain, empty),
                         doctest::Contains("additive_noise"), Error);

    chain.steps[0].kind = StepKind::kReverberation;
    CHECK_THROWS_WITH_AS(apply_chain(clean, chain, empty),
                         doctest::Contains("reverberation"), Error);
  }

  SUBCASE("chain validation") {
    DegradationChain chain;
    chain.utterance_id = "u";
    CHECK_THROWS_AS(chain.validate(), Error);  // empty
    DegradationStep a;
    a.kind = StepKind::kClipping;
    DegradationStep b;
    b.kind = StepKind::kClipping;
    chain.steps = {a, b};
    CHECK_THROWS_AS(chain.validate(), Error);  // duplicate kind
    DegradationStep noise_step;
    noise_step.kind = StepKind::kAdditiveNoise;
    chain.steps = {a, noise_step};  // clipping before noise
    CHECK_THROWS_AS(chain.validate(), Error);
  }
}
