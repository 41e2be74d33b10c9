// include/mbnf/dsp/perturb.h

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

#ifndef MBNF_DSP_PERTURB_H_
#define MBNF_DSP_PERTURB_H_

#include <string>

#include "mbnf/dsp/audio.h"

namespace mbnf {

// Playback-speed change by linear interpolation: output length is
// round(N / factor), so factor 1.1 shortens the signal and raises pitch by
// 1.1x. Factor 1.0 returns the input unchanged.
AudioSegment SpeedPerturb(const AudioSegment &audio, double factor);

// Utterance id of a perturbed copy, e.g. "sp0.9-utt1"; factor 1.0 keeps the id.
std::string PerturbedUttId(const std::string &utt_id, double factor);

}  // namespace mbnf

#endif  // MBNF_DSP_PERTURB_H_
