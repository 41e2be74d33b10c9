// include/mbnf/dsp/audio.h

// Copyright 2026  The mbnf Authors

// See ../../../LICENSE for clarification regarding multiple authors
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

#ifndef MBNF_DSP_AUDIO_H_
#define MBNF_DSP_AUDIO_H_

#include <string>
#include <vector>

namespace mbnf {

// PCM samples scaled to [-1, 1].
struct AudioSegment {
  std::string utt_id;
  int sample_rate_hz = 16000;
  std::vector<double> samples;

  double DurationSeconds() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
  // Throws ValidationError on a non-positive rate or non-finite samples.
  void Validate() const;
};

// 16-bit mono PCM WAV.
AudioSegment ReadWav(const std::string &path, const std::string &utt_id = "");
void WriteWav(const std::string &path, const AudioSegment &audio);

}  // namespace mbnf

#endif  // MBNF_DSP_AUDIO_H_
