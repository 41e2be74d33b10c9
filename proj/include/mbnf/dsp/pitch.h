// include/mbnf/dsp/pitch.h

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

#ifndef MBNF_DSP_PITCH_H_
#define MBNF_DSP_PITCH_H_

#include <vector>

#include "mbnf/dsp/audio.h"
#include "mbnf/dsp/feature-matrix.h"

namespace mbnf {

struct PitchConfig {
  double frame_len_ms = 25.0;
  double frame_shift_ms = 10.0;
  double min_f0_hz = 60.0;
  double max_f0_hz = 400.0;
  // Frames whose pov reaches this value count as voiced.
  double voicing_threshold = 0.5;
  // The shortest lag whose correlation is within this fraction of the best
  // peak wins; suppresses sub-harmonic (octave-down) errors.
  double octave_tolerance = 0.95;
  int delta_window = 2;
};

struct PitchFrame {
  double pov = 0.0;   // normalized autocorrelation at the chosen lag, in [0, 1]
  double f0_hz = 0.0; // 0 when no lag in range had positive correlation
};

// Per-frame normalized-autocorrelation pitch on the 25/10 ms grid.
std::vector<PitchFrame> TrackPitch(const AudioSegment &audio,
                                   const PitchConfig &cfg = {});

// [pov, mean-normalized log f0, delta log f0] per frame. Unvoiced frames take
// log f0 interpolated from neighbouring voiced frames.
FeatureMatrix Pitch3(const AudioSegment &audio, const PitchConfig &cfg = {});

}  // namespace mbnf

#endif  // MBNF_DSP_PITCH_H_
