// include/urgentkit/resample.h

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

#ifndef URGENTKIT_RESAMPLE_H_
#define URGENTKIT_RESAMPLE_H_

#include <vector>

#include "urgentkit/types.h"

namespace urgentkit {

/// Polyphase windowed-sinc rate conversion (Kaiser beta = 14.77, 64 taps per
/// phase, cutoff at 0.95 of the lower Nyquist). The rational ratio is reduced
/// first, e.g. 48000 -> 16000 runs as 1:3 and 44100 -> 48000 as 160:147.
/// Output length is round(len * target / source); the filter is linear-phase
/// and centered, so the output is time-aligned with the input.
AudioSignal resample(const AudioSignal &signal, int target_hz);

/// The lowpass prototype used by resample() for an L:M conversion, scaled by
/// L. Exposed for the filter-design tests and the serial reference resampler.
std::vector<double> resample_filter(int upsample_l, int downsample_m);

}  // namespace urgentkit

#endif  // URGENTKIT_RESAMPLE_H_
