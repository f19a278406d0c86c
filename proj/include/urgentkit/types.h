// include/urgentkit/types.h

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

#ifndef URGENTKIT_TYPES_H_
#define URGENTKIT_TYPES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace urgentkit {

enum class ErrorCode {
  kIoError,
  kUnsupportedEncoding,
  kChannelCount,
  kTruncatedFile,
  kEmptyData,
  kInvalidArgument,
  kRateMismatch,
  kSilentSignal,
  kTooShort,
  kMissingResource,
  kConfigError,
  kExternalCommand,
  kDuplicateEntry,
  kParseError,
  kMissingScore,
  kMissingFiles,
  kCoverageError,
  kNanValue,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Mono audio: samples nominally in [-1, 1] plus the sampling rate in Hz.
struct AudioSignal {
  std::vector<double> samples;
  int rate_hz = 0;

  AudioSignal() = default;
  AudioSignal(std::vector<double> s, int rate)
      : samples(std::move(s)), rate_hz(rate) {}

  size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return rate_hz > 0 ? static_cast<double>(samples.size()) / rate_hz : 0.0;
  }
};

// Sampling frequencies supported at pipeline boundaries.
inline const std::vector<int> &challenge_sample_rates() {
  static const std::vector<int> kRates = {8000,  16000, 22050, 24000,
                                          32000, 44100, 48000};
  return kRates;
}

/// Mean square of the samples. Throws on an empty signal.
double signal_power(const AudioSignal &signal);

/// Largest absolute sample value; 0 for empty input.
double peak_abs(const AudioSignal &signal);

/// Throws unless the signal is non-empty, finite, and has a positive rate.
void check_signal(const AudioSignal &signal, const char *what);

}  // namespace urgentkit

#endif  // URGENTKIT_TYPES_H_
