// include/mbnf/dsp/mfcc.h

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

#ifndef MBNF_DSP_MFCC_H_
#define MBNF_DSP_MFCC_H_

#include <cstddef>
#include <span>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/dsp/audio.h"
#include "mbnf/dsp/feature-matrix.h"
#include "mbnf/dsp/fft.h"

namespace mbnf {

struct MfccConfig {
  int sample_rate_hz = 16000;
  double frame_len_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_mel_filters = 23;
  int num_ceps = 13;
  double preemph_coeff = 0.97;
  double log_floor = 1e-10;
  // Cepstral lifter coefficient; 0 disables liftering.
  double lifter = 22.0;
  double low_freq_hz = 20.0;
  // 0 means the Nyquist frequency.
  double high_freq_hz = 0.0;
  int fft_size = 512;
  FeatureKind kind = FeatureKind::kMfcc13;

  // 23 filters, 13 cepstra, lifter 22; the base of mfcc13dd.
  static MfccConfig Mfcc13();
  // 40 filters, 40 cepstra, no liftering.
  static MfccConfig Mfcc40();

  std::size_t FrameLengthSamples() const;
  std::size_t FrameShiftSamples() const;
  void Validate() const;
};

// 1 + floor((N - L) / S), or 0 when N < L.
std::size_t NumFrames(std::size_t num_samples, std::size_t frame_len,
                      std::size_t frame_shift);

// num_frames x frame_len matrix of raw samples; tail samples that do not fill
// a whole frame are dropped. Throws DataError when the audio is shorter than
// one frame.
Matrix FrameSignal(const AudioSegment &audio, const MfccConfig &cfg);

// Triangular filters on the mel scale, mel(f) = 1127 ln(1 + f / 700).
class MelBanks {
 public:
  MelBanks(const MfccConfig &cfg);
  std::size_t NumFilters() const { return filters_.size(); }
  // Center frequency of filter i in Hz.
  double CenterHz(std::size_t i) const { return centers_hz_[i]; }
  // Filter energies of a power spectrum with fft_size / 2 + 1 bins.
  void Compute(std::span<const double> power, std::span<double> energies) const;

 private:
  struct Filter {
    std::size_t first_bin;
    std::vector<double> weights;
  };
  std::vector<Filter> filters_;
  std::vector<double> centers_hz_;
};

// Stateless per-frame MFCC computer; construction precomputes the window,
// filterbank and DCT so that one instance can serve many utterances.
class MfccComputer {
 public:
  explicit MfccComputer(const MfccConfig &cfg);
  const MfccConfig &config() const { return cfg_; }
  const MelBanks &banks() const { return banks_; }

  // Filterbank energies of one frame (before the log).
  void MelEnergies(std::span<const double> frame, std::span<double> energies) const;
  void ComputeFrame(std::span<const double> frame, std::span<double> ceps) const;
  FeatureMatrix Compute(const AudioSegment &audio) const;

 private:
  MfccConfig cfg_;
  FftPlan fft_;
  MelBanks banks_;
  std::vector<double> window_;
  Matrix dct_;  // num_ceps x num_mel_filters, orthonormal DCT-II rows
  std::vector<double> lifter_;
};

FeatureMatrix Mfcc(const AudioSegment &audio, const MfccConfig &cfg);

// Appends regression deltas and delta-deltas; output dim is 3 x input dim and
// mfcc13 input becomes mfcc13dd.
FeatureMatrix AddDeltas(const FeatureMatrix &feats, int window = 2);

// Regression deltas of each column with edge replication.
Matrix ComputeDeltas(const Matrix &x, int window = 2);

}  // namespace mbnf

#endif  // MBNF_DSP_MFCC_H_
