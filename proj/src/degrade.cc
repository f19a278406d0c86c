// src/degrade.cc

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

#include "urgentkit/degrade.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "urgentkit/fft.h"
#include "urgentkit/resample.h"
#include "urgentkit/rng.h"
#include "urgentkit/wav.h"

namespace urgentkit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPeakRescueTarget = 0.99;

// Canonical application order: acoustic effects first, then device and
// transmission effects.
int canonical_order(StepKind kind) {
  switch (kind) {
    case StepKind::kReverberation: return 0;
    case StepKind::kWindNoise: return 1;
    case StepKind::kAdditiveNoise: return 1;
    case StepKind::kClipping: return 2;
    case StepKind::kBandwidthLimitation: return 3;
    case StepKind::kCodec: return 4;
    case StepKind::kPacketLoss: return 5;
  }
  return 6;
}

double rescue_if_peaked(std::vector<double> &samples) {
  double peak = 0.0;
  for (double v : samples) peak = std::max(peak, std::fabs(v));
  if (peak <= 1.0) return 1.0;
  const double gain = kPeakRescueTarget / peak;
  for (double &v : samples) v *= gain;
  return gain;
}

}  // namespace

const char *step_kind_name(StepKind kind) {
  switch (kind) {
    case StepKind::kAdditiveNoise: return "additive_noise";
    case StepKind::kWindNoise: return "wind_noise";
    case StepKind::kReverberation: return "reverberation";
    case StepKind::kClipping: return "clipping";
    case StepKind::kBandwidthLimitation: return "bandwidth_limitation";
    case StepKind::kCodec: return "codec";
    case StepKind::kPacketLoss: return "packet_loss";
  }
  return "unknown";
}

StepKind step_kind_from_name(const std::string &name) {
  for (StepKind k :
       {StepKind::kAdditiveNoise, StepKind::kWindNoise,
        StepKind::kReverberation, StepKind::kClipping,
        StepKind::kBandwidthLimitation, StepKind::kCodec,
        StepKind::kPacketLoss}) {
    if (name == step_kind_name(k)) return k;
  }
  throw Error(ErrorCode::kParseError, "unknown distortion kind: " + name);
}

void DegradationChain::validate() const {
  if (steps.empty() || steps.size() > 5)
    throw Error(ErrorCode::kInvalidArgument,
                "chain must have between 1 and 5 steps, has " +
                    std::to_string(steps.size()));
  bool seen[8] = {};
  int prev = -1;
  for (const auto &s : steps) {
    const int idx = static_cast<int>(s.kind);
    if (seen[idx])
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("duplicate step kind: ") +
                      step_kind_name(s.kind));
    seen[idx] = true;
    const int ord = canonical_order(s.kind);
    if (ord < prev)
      throw Error(ErrorCode::kInvalidArgument,
                  "chain steps are not in canonical order");
    prev = ord;
  }
}

// ---------------------------------------------------------------------------

MixResult mix_at_snr(const AudioSignal &speech, const AudioSignal &noise,
                     double snr_db, uint64_t seed) {
  check_signal(speech, "mix_at_snr(speech)");
  check_signal(noise, "mix_at_snr(noise)");
  if (speech.rate_hz != noise.rate_hz)
    throw Error(ErrorCode::kRateMismatch,
                "mix_at_snr: speech at " + std::to_string(speech.rate_hz) +
                    " Hz but noise at " + std::to_string(noise.rate_hz) +
                    " Hz");
  const double p_speech = signal_power(speech);
  if (p_speech <= 0.0)
    throw Error(ErrorCode::kSilentSignal, "mix_at_snr: silent speech");

  // Adapt the noise to the speech length: tile with a seeded circular
  // offset when shorter, take a seeded excerpt when longer.
  Rng rng(seed);
  const size_t n = speech.size();
  MixResult result;
  std::vector<double> adapted(n);
  if (noise.size() < n) {
    result.noise_offset = rng.uniform_int(noise.size());
    for (size_t i = 0; i < n; ++i)
      adapted[i] = noise.samples[(result.noise_offset + i) % noise.size()];
  } else if (noise.size() > n) {
    result.noise_offset = rng.uniform_int(noise.size() - n + 1);
    std::copy_n(noise.samples.begin() + result.noise_offset, n,
                adapted.begin());
  } else {
    adapted = noise.samples;
  }

  double p_noise = 0.0;
  for (double v : adapted) p_noise += v * v;
  p_noise /= static_cast<double>(n);
  if (p_noise <= 0.0)
    throw Error(ErrorCode::kSilentSignal, "mix_at_snr: silent noise");

  // g such that 10 log10(P_speech / P_(g n)) = snr_db exactly.
  const double g =
      std::sqrt(p_speech / (p_noise * std::pow(10.0, snr_db / 10.0)));
  result.noise_gain = g;

  result.scaled_noise.rate_hz = speech.rate_hz;
  result.scaled_noise.samples.resize(n);
  result.mixture.rate_hz = speech.rate_hz;
  result.mixture.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    result.scaled_noise.samples[i] = g * adapted[i];
    result.mixture.samples[i] =
        speech.samples[i] + result.scaled_noise.samples[i];
  }
  result.rescue_gain = rescue_if_peaked(result.mixture.samples);
  result.realized_snr_db =
      10.0 * std::log10(p_speech / signal_power(result.scaled_noise));
  return result;
}

AudioSignal gen_wind_noise(double duration_s, int rate_hz, double gustiness,
                           uint64_t seed) {
  if (duration_s <= 0.0)
    throw Error(ErrorCode::kInvalidArgument,
                "gen_wind_noise: non-positive duration");
  if (rate_hz <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                "gen_wind_noise: non-positive rate");
  gustiness = std::min(1.0, std::max(0.0, gustiness));
  const size_t n = static_cast<size_t>(std::llround(duration_s * rate_hz));

  Rng rng(seed);
  // Rumble: white noise through a 2nd-order resonator at 50-300 Hz.
  const double fc = 50.0 + 250.0 * rng.uniform();
  const double r = 0.985;
  const double theta = kTwoPi * fc / rate_hz;
  const double b0 = (1.0 - r * r) * std::sin(theta);
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  std::vector<double> y(n, 0.0);
  double y1 = 0.0, y2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double v = b0 * rng.normal() + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = v;
    y[i] = v;
  }

  // Gust envelope: one-pole lowpassed noise at 0.5 + 2*gustiness Hz,
  // normalized, applied with gustiness-scaled modulation depth and a 0.05
  // floor. The depth term is what makes higher gustiness strictly more
  // variable; rate alone does not separate the two ends.
  const double cutoff_hz = 0.5 + 2.0 * gustiness;
  const double alpha = std::exp(-kTwoPi * cutoff_hz / rate_hz);
  std::vector<double> env(n);
  double state = 0.0;
  for (size_t i = 0; i < n; ++i) {
    state = alpha * state + (1.0 - alpha) * rng.normal();
    env[i] = std::fabs(state);
  }
  double env_peak = 0.0;
  for (double v : env) env_peak = std::max(env_peak, v);
  if (env_peak <= 0.0) env_peak = 1.0;
  const double depth = 0.3 + 0.65 * gustiness;
  for (size_t i = 0; i < n; ++i) {
    const double e = 1.0 - depth * (1.0 - env[i] / env_peak);
    y[i] *= std::max(0.05, e);
  }

  double peak = 0.0;
  for (double v : y) peak = std::max(peak, std::fabs(v));
  const double gain = peak > 0.0 ? 0.9 / peak : 0.0;
  for (double &v : y) v *= gain;
  return AudioSignal(std::move(y), rate_hz);
}

ReverbResult convolve_rir(const AudioSignal &speech, const AudioSignal &rir) {
  check_signal(speech, "convolve_rir(speech)");
  if (rir.empty())
    throw Error(ErrorCode::kEmptyData, "convolve_rir: empty RIR");
  if (speech.rate_hz != rir.rate_hz)
    throw Error(ErrorCode::kRateMismatch,
                "convolve_rir: speech at " + std::to_string(speech.rate_hz) +
                    " Hz but RIR at " + std::to_string(rir.rate_hz) + " Hz");

  size_t direct = 0;
  double best = 0.0;
  for (size_t i = 0; i < rir.size(); ++i) {
    const double mag = std::fabs(rir.samples[i]);
    if (mag > best) {
      best = mag;
      direct = i;
    }
  }
  if (best <= 0.0)
    throw Error(ErrorCode::kSilentSignal, "convolve_rir: all-zero RIR");

  const std::vector<double> full =
      fft_convolve(speech.samples, rir.samples);

  ReverbResult result;
  result.direct_path_index = direct;
  result.reference = speech;
  result.reverberant.rate_hz = speech.rate_hz;
  result.reverberant.samples.resize(speech.size());
  // Shift by the direct-path lag so the strongest tap lands at time zero.
  for (size_t i = 0; i < speech.size(); ++i) {
    const size_t j = i + direct;
    result.reverberant.samples[i] = j < full.size() ? full[j] : 0.0;
  }
  result.rescue_gain = rescue_if_peaked(result.reverberant.samples);
  return result;
}

AudioSignal clip_abs(const AudioSignal &signal, double threshold) {
  if (threshold < 0.0)
    throw Error(ErrorCode::kInvalidArgument, "clip_abs: negative threshold");
  AudioSignal out = signal;
  for (double &v : out.samples)
    v = std::min(std::max(v, -threshold), threshold);
  return out;
}

AudioSignal clip(const AudioSignal &signal, double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                "clip: ratio must be in (0, 1], got " + std::to_string(ratio));
  check_signal(signal, "clip");
  const double peak = peak_abs(signal);
  if (peak == 0.0) return signal;  // threshold undefined, pass through
  return clip_abs(signal, ratio * peak);
}

AudioSignal bandlimit(const AudioSignal &signal, int target_hz) {
  check_signal(signal, "bandlimit");
  if (target_hz >= signal.rate_hz)
    throw Error(ErrorCode::kInvalidArgument,
                "bandlimit: target " + std::to_string(target_hz) +
                    " Hz must be below the signal rate " +
                    std::to_string(signal.rate_hz) + " Hz");
  const auto &rates = challenge_sample_rates();
  if (std::find(rates.begin(), rates.end(), target_hz) == rates.end())
    throw Error(ErrorCode::kInvalidArgument,
                "bandlimit: target " + std::to_string(target_hz) +
                    " Hz is not a challenge sampling frequency");
  AudioSignal down = resample(signal, target_hz);
  AudioSignal up = resample(down, signal.rate_hz);
  up.samples.resize(signal.size(), 0.0);  // trim or zero-pad the tail
  return up;
}

CodecResult codec_external(const AudioSignal &signal,
                           const std::string &codec_id, int bitrate_kbps,
                           const CodecTable &templates,
                           const std::filesystem::path &workdir) {
  check_signal(signal, "codec_external");
  auto it = templates.find(codec_id);
  if (it == templates.end())
    throw Error(ErrorCode::kConfigError,
                "codec_external: no command template for codec '" + codec_id +
                    "'");
  const CodecTemplate &tpl = it->second;

  std::filesystem::create_directories(workdir);
  const auto in_path = workdir / "codec_in.wav";
  const auto packed_path =
      workdir / ("codec_packed." +
                 (tpl.extension.empty() ? std::string("bin") : tpl.extension));
  const auto out_path = workdir / "codec_out.wav";

  auto substitute = [&](std::string cmd, const std::filesystem::path &in,
                        const std::filesystem::path &out) {
    auto replace_all = [&cmd](const std::string &key, const std::string &val) {
      size_t pos = 0;
      while ((pos = cmd.find(key, pos)) != std::string::npos) {
        cmd.replace(pos, key.size(), val);
        pos += val.size();
      }
    };
    replace_all("{in}", "'" + in.string() + "'");
    replace_all("{out}", "'" + out.string() + "'");
    replace_all("{bitrate}", std::to_string(bitrate_kbps));
    return cmd;
  };

  CodecResult result;
  auto cleanup = [&]() {
    std::error_code ec;
    std::filesystem::remove(in_path, ec);
    std::filesystem::remove(packed_path, ec);
    std::filesystem::remove(out_path, ec);
  };

  try {
    write_wav(signal, in_path, WavEncoding::kFloat32);
    for (const auto &[cmd_tpl, in, out] :
         {std::tuple{tpl.encode, in_path, packed_path},
          std::tuple{tpl.decode, packed_path, out_path}}) {
      const std::string cmd = substitute(cmd_tpl, in, out);
      result.commands.push_back(cmd);
      const int status = std::system(cmd.c_str());
      if (status != 0)
        throw Error(ErrorCode::kExternalCommand,
                    "codec_external: command failed (status " +
                        std::to_string(status) + "): " + cmd);
    }
    AudioSignal decoded = read_wav(out_path);
    if (decoded.rate_hz != signal.rate_hz)
      decoded = resample(decoded, signal.rate_hz);
    decoded.samples.resize(signal.size(), 0.0);
    result.signal = std::move(decoded);
  } catch (...) {
    cleanup();
    throw;
  }
  cleanup();
  return result;
}

PacketLossResult packet_loss(const AudioSignal &signal, double p_loss,
                             double q_recover, double packet_ms,
                             uint64_t seed) {
  if (!(p_loss >= 0.0 && p_loss <= 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                "packet_loss: p_loss must be in [0, 1]");
  if (!(q_recover > 0.0 && q_recover <= 1.0))
    throw Error(ErrorCode::kInvalidArgument,
                "packet_loss: q_recover must be in (0, 1]");
  if (!(packet_ms > 0.0))
    throw Error(ErrorCode::kInvalidArgument,
                "packet_loss: packet_ms must be positive");
  check_signal(signal, "packet_loss");

  const size_t packet_len = static_cast<size_t>(
      std::max(1.0, std::nearbyint(packet_ms * signal.rate_hz / 1000.0)));
  const size_t n_packets = (signal.size() + packet_len - 1) / packet_len;

  PacketLossResult result;
  result.output = signal;
  result.loss_mask.assign(n_packets, false);

  // Two-state chain: the first packet is in the start state (good); each
  // later packet transitions from its predecessor.
  Rng rng(seed);
  bool bad = false;
  for (size_t k = 0; k < n_packets; ++k) {
    if (k > 0) {
      const double u = rng.uniform();
      bad = bad ? !(u < q_recover) : (u < p_loss);
    }
    result.loss_mask[k] = bad;
  }

  // Zero the lost runs with 1 ms raised-cosine ramps kept inside the run,
  // so kept samples are bit-identical to the input.
  const size_t ramp = static_cast<size_t>(
      std::max(1.0, std::nearbyint(signal.rate_hz / 1000.0)));
  auto &y = result.output.samples;
  size_t k = 0;
  while (k < n_packets) {
    if (!result.loss_mask[k]) {
      ++k;
      continue;
    }
    size_t k_end = k;
    while (k_end < n_packets && result.loss_mask[k_end]) ++k_end;
    const size_t a = k * packet_len;
    const size_t b = std::min(k_end * packet_len, y.size());
    const size_t run = b - a;
    const size_t r = std::min(ramp, run / 2);
    for (size_t i = 0; i < run; ++i) {
      double e = 0.0;
      if (i < r) {
        e = 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(i + 1) / r));
      } else if (run - i <= r) {
        e = 0.5 * (1.0 + std::cos(M_PI * static_cast<double>(run - i) / r));
      }
      y[a + i] *= e;
    }
    k = k_end;
  }
  return result;
}

// ---------------------------------------------------------------------------

void ChainSamplerConfig::validate() const {
  auto check_prob = [](double p, const char *name) {
    if (!(p >= 0.0 && p <= 1.0))
      throw Error(ErrorCode::kConfigError,
                  std::string("sampler: probability ") + name +
                      " outside [0, 1]");
  };
  check_prob(wind_prob, "wind_prob");
  check_prob(reverb_prob, "reverb_prob");
  check_prob(clip_prob, "clip_prob");
  check_prob(bandwidth_prob, "bandwidth_prob");
  check_prob(codec_prob, "codec_prob");
  check_prob(packet_loss_prob, "packet_loss_prob");
  if (snr_lo_db > snr_hi_db || wind_snr_lo_db > wind_snr_hi_db)
    throw Error(ErrorCode::kConfigError, "sampler: SNR range low > high");
  if (!(clip_lo > 0.0 && clip_hi <= 1.0 && clip_lo <= clip_hi))
    throw Error(ErrorCode::kConfigError,
                "sampler: clipping range must lie inside (0, 1]");
  if (bandwidth_prob > 0.0 && bandwidth_choices.empty())
    throw Error(ErrorCode::kConfigError,
                "sampler: bandwidth_prob > 0 but no bandwidth choices");
  if (codec_prob > 0.0 && (codec_choices.empty() || bitrate_choices.empty()))
    throw Error(ErrorCode::kConfigError,
                "sampler: codec_prob > 0 but no codec or bitrate choices");
  if (!(loss_prob >= 0.0 && loss_prob <= 1.0) ||
      !(recover_prob > 0.0 && recover_prob <= 1.0) || !(packet_ms > 0.0))
    throw Error(ErrorCode::kConfigError,
                "sampler: invalid packet-loss parameters");
}

DegradationChain sample_chain(const ChainSamplerConfig &config,
                              const std::string &utterance_id, int rate_hz) {
  config.validate();
  Rng rng(derive_seed(config.master_seed, utterance_id));

  // Inclusion draws come first, in a fixed order, so parameter draws cannot
  // shift between runs with different configs for the same (seed, id).
  const bool wind = rng.uniform() < config.wind_prob;
  bool with_reverb = rng.uniform() < config.reverb_prob;
  bool with_clip = rng.uniform() < config.clip_prob;
  bool with_bw = rng.uniform() < config.bandwidth_prob;
  bool with_codec = rng.uniform() < config.codec_prob;
  bool with_ploss = rng.uniform() < config.packet_loss_prob;

  std::vector<int> bw_choices;
  for (int bw : config.bandwidth_choices)
    if (rate_hz <= 0 || bw < rate_hz) bw_choices.push_back(bw);
  if (bw_choices.empty()) with_bw = false;

  // Cap at five steps: drop the least essential kinds first.
  size_t total = 1 + with_reverb + with_clip + with_bw + with_codec +
                 with_ploss;
  for (bool *victim : {&with_codec, &with_ploss, &with_clip, &with_bw,
                       &with_reverb}) {
    if (total <= 5) break;
    if (*victim) {
      *victim = false;
      --total;
    }
  }

  DegradationChain chain;
  chain.utterance_id = utterance_id;

  auto add = [&](StepKind kind) -> DegradationStep & {
    DegradationStep step;
    step.kind = kind;
    step.seed = rng.next_u64();
    chain.steps.push_back(step);
    return chain.steps.back();
  };

  if (with_reverb) add(StepKind::kReverberation);
  if (wind) {
    auto &s = add(StepKind::kWindNoise);
    s.snr_db = rng.uniform(config.wind_snr_lo_db, config.wind_snr_hi_db);
    s.gustiness = rng.uniform();
  } else {
    auto &s = add(StepKind::kAdditiveNoise);
    s.snr_db = rng.uniform(config.snr_lo_db, config.snr_hi_db);
  }
  if (with_clip) {
    auto &s = add(StepKind::kClipping);
    s.clip_ratio = rng.uniform(config.clip_lo, config.clip_hi);
  }
  if (with_bw) {
    auto &s = add(StepKind::kBandwidthLimitation);
    s.bandwidth_hz = bw_choices[rng.uniform_int(bw_choices.size())];
  }
  if (with_codec) {
    auto &s = add(StepKind::kCodec);
    s.codec_id = config.codec_choices[rng.uniform_int(
        config.codec_choices.size())];
    s.bitrate_kbps = config.bitrate_choices[rng.uniform_int(
        config.bitrate_choices.size())];
  }
  if (with_ploss) {
    auto &s = add(StepKind::kPacketLoss);
    s.loss_prob = config.loss_prob;
    s.recover_prob = config.recover_prob;
    s.packet_ms = config.packet_ms;
  }

  chain.validate();
  return chain;
}

ApplyResult apply_chain(const AudioSignal &clean,
                        const DegradationChain &chain,
                        const ChainResources &resources) {
  check_signal(clean, "apply_chain");
  chain.validate();

  ApplyResult result;
  result.reference = clean;
  result.metadata.utterance_id = chain.utterance_id;
  result.metadata.output_rate_hz = clean.rate_hz;

  AudioSignal current = clean;
  for (const auto &step : chain.steps) {
    StepRecord record;
    record.kind = step.kind;
    record.seed = step.seed;
    try {
      switch (step.kind) {
        case StepKind::kReverberation: {
          if (resources.rir == nullptr)
            throw Error(ErrorCode::kMissingResource,
                        "no RIR resource supplied");
          ReverbResult rr = convolve_rir(current, *resources.rir);
          record.realized["rescue_gain"] = rr.rescue_gain;
          record.realized["direct_path_index"] =
              static_cast<double>(rr.direct_path_index);
          record.resource_id = resources.rir_id;
          if (resources.reverb_reference_early_ms > 0.0) {
            // reference = direct path plus early reflections: convolve the
            // dry speech with the RIR truncated past the early window
            const AudioSignal &rir = *resources.rir;
            const size_t early = static_cast<size_t>(std::nearbyint(
                resources.reverb_reference_early_ms * rir.rate_hz / 1000.0));
            AudioSignal truncated = rir;
            const size_t cut =
                std::min(rir.size(), rr.direct_path_index + early);
            truncated.samples.assign(rir.samples.begin(),
                                     rir.samples.begin() + cut);
            result.reference =
                convolve_rir(result.reference, truncated).reverberant;
            record.realized["reference_early_ms"] =
                resources.reverb_reference_early_ms;
          }
          current = std::move(rr.reverberant);
          break;
        }
        case StepKind::kAdditiveNoise:
        case StepKind::kWindNoise: {
          AudioSignal noise;
          if (step.kind == StepKind::kWindNoise) {
            noise = gen_wind_noise(current.duration_s(), current.rate_hz,
                                   step.gustiness, step.seed);
            record.params["gustiness"] = step.gustiness;
            record.resource_id = "synthetic";  // generated, not recorded wind
          } else {
            if (resources.noise == nullptr)
              throw Error(ErrorCode::kMissingResource,
                          "no noise resource supplied");
            noise = *resources.noise;
            record.resource_id = resources.noise_id;
          }
          record.params["snr_db"] = step.snr_db;
          MixResult mr = mix_at_snr(current, noise, step.snr_db, step.seed);
          record.realized["snr_db"] = mr.realized_snr_db;
          record.realized["noise_gain"] = mr.noise_gain;
          record.realized["rescue_gain"] = mr.rescue_gain;
          record.realized["noise_offset"] =
              static_cast<double>(mr.noise_offset);
          result.metadata.realized_snr_db = mr.realized_snr_db;
          current = std::move(mr.mixture);
          break;
        }
        case StepKind::kClipping: {
          record.params["ratio"] = step.clip_ratio;
          record.realized["threshold"] =
              step.clip_ratio * peak_abs(current);
          current = clip(current, step.clip_ratio);
          break;
        }
        case StepKind::kBandwidthLimitation: {
          record.params["bandwidth_hz"] =
              static_cast<double>(step.bandwidth_hz);
          current = bandlimit(current, step.bandwidth_hz);
          break;
        }
        case StepKind::kCodec: {
          if (resources.codecs == nullptr)
            throw Error(ErrorCode::kMissingResource,
                        "no codec template table supplied");
          record.params["bitrate_kbps"] =
              static_cast<double>(step.bitrate_kbps);
          CodecResult cr =
              codec_external(current, step.codec_id, step.bitrate_kbps,
                             *resources.codecs, resources.codec_workdir);
          record.commands = cr.commands;
          record.resource_id = step.codec_id;
          current = std::move(cr.signal);
          break;
        }
        case StepKind::kPacketLoss: {
          record.params["p_loss"] = step.loss_prob;
          record.params["q_recover"] = step.recover_prob;
          record.params["packet_ms"] = step.packet_ms;
          PacketLossResult pr =
              packet_loss(current, step.loss_prob, step.recover_prob,
                          step.packet_ms, step.seed);
          size_t lost = 0;
          for (bool b : pr.loss_mask) lost += b;
          record.realized["lost_packets"] = static_cast<double>(lost);
          record.realized["total_packets"] =
              static_cast<double>(pr.loss_mask.size());
          current = std::move(pr.output);
          break;
        }
      }
    } catch (const Error &e) {
      throw Error(e.code(), std::string("apply_chain[") +
                                step_kind_name(step.kind) + "]: " + e.what());
    }
    result.metadata.steps.push_back(std::move(record));
  }

  result.degraded = std::move(current);
  return result;
}

}  // namespace urgentkit
