// include/urgentkit/wav.h

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

#ifndef URGENTKIT_WAV_H_
#define URGENTKIT_WAV_H_

#include <filesystem>

#include "urgentkit/types.h"

namespace urgentkit {

enum class WavEncoding { kPcm16, kPcm24, kFloat32 };

/// Reads mono RIFF/WAVE (PCM 16/24-bit or IEEE float 32-bit). Integer PCM is
/// mapped to [-1, 1) by dividing by 2^(bits-1).
AudioSignal read_wav(const std::filesystem::path &path);

/// Writes a mono WAV. float32 preserves sample values exactly; pcm16/pcm24
/// round to nearest with saturation at full scale. No dithering.
void write_wav(const AudioSignal &signal, const std::filesystem::path &path,
               WavEncoding encoding = WavEncoding::kFloat32);

}  // namespace urgentkit

#endif  // URGENTKIT_WAV_H_
