// src/dsp/perturb.cc

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

#include "mbnf/dsp/perturb.h"

#include <cmath>
#include <cstdio>

#include "mbnf/base/error.h"

namespace mbnf {

AudioSegment SpeedPerturb(const AudioSegment &audio, double factor) {
  if (!(factor > 0.0)) throw ConfigError("speed perturbation factor must be positive");
  if (factor == 1.0) return audio;
  const std::size_t n = audio.samples.size();
  AudioSegment out;
  out.utt_id = audio.utt_id;
  out.sample_rate_hz = audio.sample_rate_hz;
  if (n == 0) return out;
  const auto out_len =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) / factor));
  out.samples.resize(out_len);
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = static_cast<double>(i) * factor;
    const auto base = static_cast<std::size_t>(std::floor(pos));
    if (base >= n - 1) {
      out.samples[i] = audio.samples[n - 1];
      continue;
    }
    const double frac = pos - static_cast<double>(base);
    out.samples[i] = frac == 0.0 ? audio.samples[base]
                                 : (1.0 - frac) * audio.samples[base] +
                                       frac * audio.samples[base + 1];
  }
  return out;
}

std::string PerturbedUttId(const std::string &utt_id, double factor) {
  if (factor == 1.0) return utt_id;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "sp%g-", factor);
  return buf + utt_id;
}

}  // namespace mbnf
