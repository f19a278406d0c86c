// src/audio.cc

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

#include "urgentkit/types.h"

#include <cmath>
#include <string>

namespace urgentkit {

double signal_power(const AudioSignal &signal) {
  if (signal.empty())
    throw Error(ErrorCode::kEmptyData, "signal_power: empty signal");
  double acc = 0.0;
  for (double v : signal.samples) acc += v * v;
  return acc / static_cast<double>(signal.samples.size());
}

double peak_abs(const AudioSignal &signal) {
  double peak = 0.0;
  for (double v : signal.samples) peak = std::max(peak, std::fabs(v));
  return peak;
}

void check_signal(const AudioSignal &signal, const char *what) {
  if (signal.rate_hz <= 0)
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + ": non-positive sampling rate");
  if (signal.empty())
    throw Error(ErrorCode::kEmptyData, std::string(what) + ": empty signal");
  for (double v : signal.samples) {
    if (!std::isfinite(v))
      throw Error(ErrorCode::kNanValue,
                  std::string(what) + ": non-finite sample");
  }
}

}  // namespace urgentkit
