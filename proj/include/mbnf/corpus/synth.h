// include/mbnf/corpus/synth.h

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

#ifndef MBNF_CORPUS_SYNTH_H_
#define MBNF_CORPUS_SYNTH_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/corpus/alignment.h"
#include "mbnf/corpus/corpus.h"
#include "mbnf/dsp/audio.h"

namespace mbnf {

// Additive sinusoids that realize one phone in waveform mode.
struct ToneRecipe {
  std::vector<double> freqs_hz;  // 1 to 3 entries
  std::vector<double> amps;
};

struct SynthLanguage {
  PhoneSet phoneset;
  int num_utterances = 0;
  int min_phones = 3;
  int max_phones = 6;
  // block_size x emission_dim Gaussian parameters per phone state.
  Matrix state_means;
  Matrix state_vars;
  // One recipe per phone; only needed for waveform synthesis.
  std::vector<ToneRecipe> tones;
};

struct SynthConfig {
  std::vector<SynthLanguage> languages;
  int emission_dim = 1;
  int min_frames_per_state = 2;
  int max_frames_per_state = 6;
  // Scales each state's standard deviation; 0 emits the means exactly.
  double noise_level = 1.0;
  // Utterances alternating between languages[0] and one other language.
  int num_cs_utterances = 0;
  int cs_min_segment = 1;  // phones per monolingual stretch
  int cs_max_segment = 3;
  // Waveform mode.
  int sample_rate_hz = 16000;
  int samples_per_frame = 160;
  double waveform_noise_std = 0.0;
  // State s of a phone plays its tones at (1 + s * state_freq_step) x freq.
  double state_freq_step = 0.0;
  // Extra samples rendered before the first and after the last frame. With
  // (frame_len - frame_shift) / 2 = 120 at 25/10 ms, feature frame t is
  // centered on synthesis frame t.
  int edge_pad_samples = 0;
  std::uint64_t seed = 0;

  LanguageInventory Inventory() const;
  int TotalUtterances() const;
  // Throws ConfigError when the configuration cannot be synthesized.
  void Validate(bool waveform) const;
};

struct SynthUtterance {
  UtteranceRecord record;
  Matrix emissions;       // frames x emission_dim
  AlignmentMatrix gold;   // generating state of every frame
};

// Feature-domain corpus: each frame is drawn from its phone state's Gaussian.
std::vector<SynthUtterance> SynthCorpus(const SynthConfig &cfg);

struct PhoneSegment {
  std::size_t phone_position;  // index into the utterance's phone sequence
  std::size_t start_sample;
  std::size_t end_sample;      // exclusive
};

struct SynthWaveform {
  UtteranceRecord record;
  AudioSegment audio;
  std::vector<PhoneSegment> segments;
  AlignmentMatrix gold;  // on the samples_per_frame grid
};

// Waveform corpus with the same transcripts and durations as SynthCorpus.
std::vector<SynthWaveform> SynthWaveforms(const SynthConfig &cfg);

// Renders consecutive segments, each a sum of sinusoids, plus optional
// Gaussian noise. Segment k occupies samples [bounds[k].first, bounds[k].second).
// Throws ConfigError for any frequency at or above Nyquist.
AudioSegment RenderTones(const std::vector<ToneRecipe> &recipes,
                         const std::vector<std::size_t> &num_samples,
                         int sample_rate_hz, double noise_std, std::uint64_t seed,
                         std::vector<std::pair<std::size_t, std::size_t>> *bounds = nullptr);

struct SynthPreset {
  std::vector<std::string> languages = {"eng", "zul"};
  int phones_per_language = 5;
  int states_per_phone = 3;
  int utterances_per_language = 30;
  int num_cs_utterances = 0;
  int min_phones = 3;
  int max_phones = 6;
  int emission_dim = 6;
  // State means are distinct points of {-separation, +separation}^dim.
  double separation = 5.0;
  int min_frames_per_state = 2;
  int max_frames_per_state = 6;
  double noise_level = 1.0;
  // Every phone has one tone in the f0 range plus 0 to 2 higher tones.
  double f0_min_hz = 90.0;
  double f0_max_hz = 300.0;
  double tone_min_hz = 400.0;
  double tone_max_hz = 3500.0;
  double waveform_noise_std = 0.02;
  double state_freq_step = 0.12;
  int edge_pad_samples = 120;
  std::uint64_t seed = 7;
};

// Random but seed-determined phone inventories, emission Gaussians and tone
// recipes. Phone symbols carry the language code: "zul_p00", "zul_p01", ...
SynthConfig MakeSynthConfig(const SynthPreset &preset);

// The separable two-language feature-domain corpus used for alignment checks
// (unit variances, means +-5, seed 7 unless overridden).
SynthConfig ReferenceSeparableConfig(std::uint64_t seed = 7);

}  // namespace mbnf

#endif  // MBNF_CORPUS_SYNTH_H_
