// src/wav.cc

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

#include "urgentkit/wav.h"

#include <cmath>
#include <cstring>
#include <fstream>

namespace urgentkit {

namespace {

// Chunked RIFF little-endian reader. Only fmt and data matter; anything
// else (LIST, fact, ...) is skipped.

uint32_t rd_u32(const unsigned char *p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const unsigned char *p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::string &s, uint32_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
  s.push_back(static_cast<char>((v >> 16) & 0xff));
  s.push_back(static_cast<char>((v >> 24) & 0xff));
}

void wr_u16(std::string &s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

constexpr uint16_t kFormatPcm = 1;
constexpr uint16_t kFormatFloat = 3;
constexpr uint16_t kFormatExtensible = 0xfffe;

}  // namespace

AudioSignal read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw Error(ErrorCode::kIoError, "read_wav: cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto *p = reinterpret_cast<const unsigned char *>(bytes.data());
  const size_t size = bytes.size();

  if (size < 12 || std::memcmp(p, "RIFF", 4) != 0 ||
      std::memcmp(p + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::kTruncatedFile,
                "read_wav: not a RIFF/WAVE file: " + path.string());

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  bool have_fmt = false;
  size_t data_off = 0, data_len = 0;

  size_t off = 12;
  while (off + 8 <= size) {
    const char *id = bytes.data() + off;
    uint32_t chunk_len = rd_u32(p + off + 4);
    size_t body = off + 8;
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (body + 16 > size)
        throw Error(ErrorCode::kTruncatedFile,
                    "read_wav: truncated fmt chunk: " + path.string());
      format = rd_u16(p + body);
      channels = rd_u16(p + body + 2);
      rate = rd_u32(p + body + 4);
      bits = rd_u16(p + body + 14);
      if (format == kFormatExtensible) {
        // sub-format GUID starts with the wave format code
        if (body + 26 > size)
          throw Error(ErrorCode::kTruncatedFile,
                      "read_wav: truncated extensible fmt: " + path.string());
        format = rd_u16(p + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    off = body + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }

  if (!have_fmt || data_off == 0)
    throw Error(ErrorCode::kTruncatedFile,
                "read_wav: missing fmt or data chunk: " + path.string());
  if (channels != 1)
    throw Error(ErrorCode::kChannelCount,
                "read_wav: expected 1 channel, got " +
                    std::to_string(channels) + ": " + path.string());
  const bool pcm16 = format == kFormatPcm && bits == 16;
  const bool pcm24 = format == kFormatPcm && bits == 24;
  const bool f32 = format == kFormatFloat && bits == 32;
  if (!pcm16 && !pcm24 && !f32)
    throw Error(ErrorCode::kUnsupportedEncoding,
                "read_wav: unsupported encoding (format " +
                    std::to_string(format) + ", " + std::to_string(bits) +
                    " bits): " + path.string());
  if (data_off + data_len > size)
    throw Error(ErrorCode::kTruncatedFile,
                "read_wav: data chunk exceeds file size: " + path.string());
  if (data_len == 0)
    throw Error(ErrorCode::kEmptyData,
                "read_wav: zero-length data chunk: " + path.string());

  const int bytes_per = bits / 8;
  const size_t n = data_len / bytes_per;
  AudioSignal sig;
  sig.rate_hz = static_cast<int>(rate);
  sig.samples.resize(n);
  const unsigned char *d = p + data_off;
  if (pcm16) {
    for (size_t i = 0; i < n; ++i) {
      int16_t v = static_cast<int16_t>(d[2 * i] | (d[2 * i + 1] << 8));
      sig.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else if (pcm24) {
    for (size_t i = 0; i < n; ++i) {
      int32_t v = d[3 * i] | (d[3 * i + 1] << 8) | (d[3 * i + 2] << 16);
      if (v & 0x800000) v |= ~0xffffff;  // sign-extend
      sig.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  } else {
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = rd_u32(d + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      sig.samples[i] = static_cast<double>(f);
    }
  }
  return sig;
}

void write_wav(const AudioSignal &signal, const std::filesystem::path &path,
               WavEncoding encoding) {
  check_signal(signal, "write_wav");

  const int bits = encoding == WavEncoding::kPcm16   ? 16
                   : encoding == WavEncoding::kPcm24 ? 24
                                                     : 32;
  const int bytes_per = bits / 8;
  const uint16_t format =
      encoding == WavEncoding::kFloat32 ? kFormatFloat : kFormatPcm;
  const uint32_t data_len =
      static_cast<uint32_t>(signal.samples.size() * bytes_per);

  std::string out;
  out.reserve(44 + data_len);
  out += "RIFF";
  wr_u32(out, 36 + data_len);
  out += "WAVEfmt ";
  wr_u32(out, 16);
  wr_u16(out, format);
  wr_u16(out, 1);  // mono
  wr_u32(out, static_cast<uint32_t>(signal.rate_hz));
  wr_u32(out, static_cast<uint32_t>(signal.rate_hz * bytes_per));
  wr_u16(out, static_cast<uint16_t>(bytes_per));
  wr_u16(out, static_cast<uint16_t>(bits));
  out += "data";
  wr_u32(out, data_len);

  if (encoding == WavEncoding::kPcm16) {
    for (double v : signal.samples) {
      double scaled = std::nearbyint(v * 32768.0);
      int32_t q = static_cast<int32_t>(
          std::min(32767.0, std::max(-32768.0, scaled)));
      wr_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
    }
  } else if (encoding == WavEncoding::kPcm24) {
    for (double v : signal.samples) {
      double scaled = std::nearbyint(v * 8388608.0);
      int32_t q = static_cast<int32_t>(
          std::min(8388607.0, std::max(-8388608.0, scaled)));
      out.push_back(static_cast<char>(q & 0xff));
      out.push_back(static_cast<char>((q >> 8) & 0xff));
      out.push_back(static_cast<char>((q >> 16) & 0xff));
    }
  } else {
    for (double v : signal.samples) {
      float f = static_cast<float>(v);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      wr_u32(out, u);
    }
  }

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os)
    throw Error(ErrorCode::kIoError,
                "write_wav: cannot open for writing: " + path.string());
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!os)
    throw Error(ErrorCode::kIoError,
                "write_wav: write failed: " + path.string());
}

}  // namespace urgentkit
