// src/dsp/audio.cc

// Copyright 2026  The mbnf Authors

// See ../../LICENSE for clarification regarding multiple authors
//
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

#include "mbnf/dsp/audio.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mbnf/base/error.h"

namespace mbnf {
namespace {

std::uint32_t ReadLe32(const unsigned char *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t ReadLe16(const unsigned char *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void PutLe32(std::string *out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out->push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutLe16(std::string *out, std::uint16_t v) {
  out->push_back(static_cast<char>(v & 0xff));
  out->push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

void AudioSegment::Validate() const {
  if (sample_rate_hz <= 0)
    throw ValidationError("audio " + utt_id + ": sample rate must be positive");
  for (double s : samples)
    if (!std::isfinite(s))
      throw ValidationError("audio " + utt_id + ": non-finite sample");
}

AudioSegment ReadWav(const std::string &path, const std::string &utt_id) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open WAV file " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw ParseError(path + ": not a RIFF/WAVE file");

  AudioSegment audio;
  audio.utt_id = utt_id;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char *chunk = bytes.data() + pos;
    std::uint32_t size = ReadLe32(chunk + 4);
    std::size_t body = pos + 8;
    if (body + size > bytes.size()) throw ParseError(path + ": truncated chunk");
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw ParseError(path + ": short fmt chunk");
      std::uint16_t format = ReadLe16(bytes.data() + body);
      std::uint16_t channels = ReadLe16(bytes.data() + body + 2);
      audio.sample_rate_hz = static_cast<int>(ReadLe32(bytes.data() + body + 4));
      std::uint16_t bits = ReadLe16(bytes.data() + body + 14);
      if (format != 1 || channels != 1 || bits != 16)
        throw ParseError(path + ": only 16-bit mono PCM is supported");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw ParseError(path + ": data chunk before fmt chunk");
      std::size_t n = size / 2;
      audio.samples.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        auto v = static_cast<std::int16_t>(ReadLe16(bytes.data() + body + 2 * i));
        audio.samples[i] = v / 32768.0;
      }
      return audio;
    }
    pos = body + size + (size & 1);
  }
  throw ParseError(path + ": no data chunk");
}

void WriteWav(const std::string &path, const AudioSegment &audio) {
  std::string out;
  const auto data_bytes = static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.append("RIFF");
  PutLe32(&out, 36 + data_bytes);
  out.append("WAVEfmt ");
  PutLe32(&out, 16);
  PutLe16(&out, 1);
  PutLe16(&out, 1);
  PutLe32(&out, static_cast<std::uint32_t>(audio.sample_rate_hz));
  PutLe32(&out, static_cast<std::uint32_t>(audio.sample_rate_hz * 2));
  PutLe16(&out, 2);
  PutLe16(&out, 16);
  out.append("data");
  PutLe32(&out, data_bytes);
  for (double s : audio.samples) {
    double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
    PutLe16(&out, static_cast<std::uint16_t>(static_cast<std::int16_t>(scaled)));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write WAV file " + path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

}  // namespace mbnf
