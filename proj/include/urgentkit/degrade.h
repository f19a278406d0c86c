// include/urgentkit/degrade.h

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

#ifndef URGENTKIT_DEGRADE_H_
#define URGENTKIT_DEGRADE_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "urgentkit/types.h"

namespace urgentkit {

enum class StepKind {
  kAdditiveNoise,
  kWindNoise,
  kReverberation,
  kClipping,
  kBandwidthLimitation,
  kCodec,
  kPacketLoss,
};

const char *step_kind_name(StepKind kind);
StepKind step_kind_from_name(const std::string &name);

/// One parameterized distortion. Only the fields for the given kind are
/// meaningful; `seed` fully determines any randomness inside the step.
struct DegradationStep {
  StepKind kind = StepKind::kAdditiveNoise;
  uint64_t seed = 0;

  double snr_db = 0.0;       // additive_noise, wind_noise
  double gustiness = 0.5;    // wind_noise
  double clip_ratio = 1.0;   // clipping
  int bandwidth_hz = 0;      // bandwidth_limitation
  std::string codec_id;      // codec
  int bitrate_kbps = 0;      // codec
  double loss_prob = 0.0;    // packet_loss
  double recover_prob = 1.0; // packet_loss
  double packet_ms = 20.0;   // packet_loss
};

/// Ordered distortion chain for one utterance; 1..5 steps, at most one of
/// each kind, stored in canonical application order.
struct DegradationChain {
  std::vector<DegradationStep> steps;
  std::string utterance_id;

  void validate() const;
};

// ---------------------------------------------------------------------------
// Individual distortions

struct MixResult {
  AudioSignal mixture;
  AudioSignal scaled_noise;  // g * adapted noise, before any peak rescue
  double noise_gain = 1.0;   // the SNR gain g
  double rescue_gain = 1.0;  // extra gain applied when |mixture| peaked > 1
  size_t noise_offset = 0;   // circular offset (tiling) or excerpt start
  double realized_snr_db = 0.0;
};

/// Scales noise to hit snr_db exactly against the speech power, then adds.
/// Shorter noise is tiled with a seeded circular offset; longer noise
/// contributes a seeded excerpt. If the mix peaks above 1, the mixture is
/// rescaled to peak 0.99 and the gain recorded.
MixResult mix_at_snr(const AudioSignal &speech, const AudioSignal &noise,
                     double snr_db, uint64_t seed);

/// Synthetic wind noise: seeded Gaussian noise through a 2nd-order resonator
/// (50-300 Hz) shaped by a slow stochastic gust envelope. gustiness in [0,1]
/// raises both the envelope rate (cutoff 0.5 + 2*gustiness Hz) and its
/// modulation depth. Peak-normalized to 0.9. Fully determined by
/// (seed, rate, duration, gustiness).
AudioSignal gen_wind_noise(double duration_s, int rate_hz, double gustiness,
                           uint64_t seed);

struct ReverbResult {
  AudioSignal reverberant;
  AudioSignal reference;     // dry input speech, unchanged
  double rescue_gain = 1.0;
  size_t direct_path_index = 0;  // max-|h| tap mapped to lag 0
};

/// Full linear convolution with the RIR, truncated to the speech length and
/// aligned so the RIR's maximum-magnitude tap lands at lag 0.
ReverbResult convolve_rir(const AudioSignal &speech, const AudioSignal &rir);

/// Hard limit at t = ratio * max|signal|, ratio in (0, 1]. An all-zero
/// signal passes through unchanged (the threshold is undefined).
AudioSignal clip(const AudioSignal &signal, double ratio);

/// Hard limit at an absolute threshold t >= 0 (idempotent by construction).
AudioSignal clip_abs(const AudioSignal &signal, double threshold);

/// Removes content above target_hz/2 by resampling down to target_hz and
/// back up, trimming or zero-padding the tail to the input length.
AudioSignal bandlimit(const AudioSignal &signal, int target_hz);

struct CodecTemplate {
  std::string encode;     // shell command with {in}, {out}, {bitrate}
  std::string decode;     // shell command with {in}, {out}
  std::string extension;  // compressed-file extension, e.g. "mp3"
};
using CodecTable = std::map<std::string, CodecTemplate>;

struct CodecResult {
  AudioSignal signal;
  std::vector<std::string> commands;  // the exact commands that ran
};

/// Round-trips the signal through an external encode/decode command pair.
/// Temp files live under workdir and are removed afterwards. Any failure
/// (missing template, nonzero exit, undecodable output) is a hard error.
CodecResult codec_external(const AudioSignal &signal,
                           const std::string &codec_id, int bitrate_kbps,
                           const CodecTable &templates,
                           const std::filesystem::path &workdir);

struct PacketLossResult {
  AudioSignal output;
  std::vector<bool> loss_mask;  // per packet, true = lost
};

/// Gilbert-Elliott packet loss. The signal is split into packets of
/// round(packet_ms * rate / 1000) samples; a two-state Markov chain
/// (good -> bad w.p. p_loss, bad -> good w.p. q_recover) starts in the good
/// state, so the first packet is always kept. Lost packets are zeroed with
/// 1 ms raised-cosine ramps inside the lost run; kept samples are untouched.
PacketLossResult packet_loss(const AudioSignal &signal, double p_loss,
                             double q_recover, double packet_ms,
                             uint64_t seed);

// ---------------------------------------------------------------------------
// Chain sampling and application

struct ChainSamplerConfig {
  // Exactly one of {additive_noise, wind_noise} is always included;
  // wind_prob is the probability that it is the wind step.
  double wind_prob = 0.1;
  double reverb_prob = 0.5;
  double clip_prob = 0.25;
  double bandwidth_prob = 0.5;
  double codec_prob = 0.25;
  double packet_loss_prob = 0.25;

  double snr_lo_db = -5.0, snr_hi_db = 20.0;            // additive noise
  double wind_snr_lo_db = -5.0, wind_snr_hi_db = 15.0;  // wind noise
  double clip_lo = 0.1, clip_hi = 0.9;
  std::vector<int> bandwidth_choices = {8000, 16000, 22050, 24000, 32000};
  std::vector<std::string> codec_choices;  // ids into the codec table
  std::vector<int> bitrate_choices = {32, 64, 128};
  double loss_prob = 0.05, recover_prob = 0.5, packet_ms = 20.0;

  uint64_t master_seed = 0;

  void validate() const;
};

/// Samples a chain for one utterance. Deterministic in
/// (master_seed, utterance_id). When rate_hz > 0, bandwidth targets are
/// restricted to values below the utterance rate (the step is skipped when
/// none qualify). Steps come out in canonical order; if more than five kinds
/// are drawn, the lowest-priority ones are dropped (codec first, then
/// packet_loss, clipping, bandwidth_limitation, reverberation).
DegradationChain sample_chain(const ChainSamplerConfig &config,
                              const std::string &utterance_id,
                              int rate_hz = 0);

struct ChainResources {
  const AudioSignal *noise = nullptr;       // for additive_noise
  const AudioSignal *rir = nullptr;         // for reverberation
  const CodecTable *codecs = nullptr;       // for codec
  std::filesystem::path codec_workdir;
  std::string noise_id;  // provenance only, copied into metadata
  std::string rir_id;
  // Metric-reference convention under reverberation: 0 keeps the dry clean
  // speech; a positive value makes the reference the clean speech convolved
  // with the RIR truncated that many ms past the direct path ("direct path
  // + early reflections").
  double reverb_reference_early_ms = 0.0;
};

/// Metadata for one realized step, serializable to the run metadata JSON.
struct StepRecord {
  StepKind kind;
  uint64_t seed = 0;
  std::map<std::string, double> params;
  std::map<std::string, double> realized;  // gains, realized SNR, ...
  std::vector<std::string> commands;       // codec steps only
  std::string resource_id;                 // noise/rir id when applicable
};

struct ChainMetadata {
  std::string utterance_id;
  std::vector<StepRecord> steps;
  // realized SNR of the noise step, NaN when the chain has none
  double realized_snr_db = std::numeric_limits<double>::quiet_NaN();
  int output_rate_hz = 0;
};

struct ApplyResult {
  AudioSignal degraded;
  AudioSignal reference;
  ChainMetadata metadata;
};

/// Applies a chain in canonical order:
/// reverberation -> wind/additive noise -> clipping -> bandwidth_limitation
/// -> codec -> packet_loss. The reference output is the dry clean speech at
/// the degraded signal's rate and length. Step failures propagate with the
/// step kind attached.
ApplyResult apply_chain(const AudioSignal &clean,
                        const DegradationChain &chain,
                        const ChainResources &resources);

}  // namespace urgentkit

#endif  // URGENTKIT_DEGRADE_H_
