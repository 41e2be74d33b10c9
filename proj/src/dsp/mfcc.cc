// src/dsp/mfcc.cc

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

#include "mbnf/dsp/mfcc.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {
namespace {

double MelScale(double hz) { return 1127.0 * std::log(1.0 + hz / 700.0); }
double InverseMelScale(double mel) { return 700.0 * (std::exp(mel / 1127.0) - 1.0); }

}  // namespace

MfccConfig MfccConfig::Mfcc13() { return MfccConfig{}; }

MfccConfig MfccConfig::Mfcc40() {
  MfccConfig cfg;
  cfg.num_mel_filters = 40;
  cfg.num_ceps = 40;
  cfg.lifter = 0.0;
  cfg.kind = FeatureKind::kMfcc40;
  return cfg;
}

std::size_t MfccConfig::FrameLengthSamples() const {
  return static_cast<std::size_t>(std::lround(sample_rate_hz * frame_len_ms / 1000.0));
}

std::size_t MfccConfig::FrameShiftSamples() const {
  return static_cast<std::size_t>(std::lround(sample_rate_hz * frame_shift_ms / 1000.0));
}

void MfccConfig::Validate() const {
  if (sample_rate_hz <= 0) throw ConfigError("mfcc: sample rate must be positive");
  if (frame_shift_ms <= 0 || frame_len_ms <= 0 || frame_shift_ms > frame_len_ms)
    throw ConfigError("mfcc: need 0 < frame_shift <= frame_len");
  if (num_ceps < 1 || num_mel_filters < 1 || num_ceps > num_mel_filters)
    throw ConfigError("mfcc: need 1 <= num_ceps <= num_mel_filters");
  if (FrameLengthSamples() > static_cast<std::size_t>(fft_size))
    throw ConfigError("mfcc: frame longer than the FFT size");
  double nyquist = sample_rate_hz / 2.0;
  double high = high_freq_hz > 0 ? high_freq_hz : nyquist;
  if (low_freq_hz < 0 || high > nyquist || low_freq_hz >= high)
    throw ConfigError("mfcc: invalid filterbank frequency range");
  if (log_floor <= 0) throw ConfigError("mfcc: log floor must be positive");
}

std::size_t NumFrames(std::size_t num_samples, std::size_t frame_len,
                      std::size_t frame_shift) {
  if (num_samples < frame_len || frame_shift == 0) return 0;
  return 1 + (num_samples - frame_len) / frame_shift;
}

Matrix FrameSignal(const AudioSegment &audio, const MfccConfig &cfg) {
  const std::size_t len = cfg.FrameLengthSamples();
  const std::size_t shift = cfg.FrameShiftSamples();
  const std::size_t frames = NumFrames(audio.samples.size(), len, shift);
  if (frames == 0)
    throw DataError("audio " + audio.utt_id + " is too short for one frame (" +
                    std::to_string(audio.samples.size()) + " < " +
                    std::to_string(len) + " samples)");
  Matrix out(frames, len);
  for (std::size_t f = 0; f < frames; ++f)
    std::copy_n(audio.samples.begin() + static_cast<std::ptrdiff_t>(f * shift), len,
                out.Row(f).begin());
  return out;
}

MelBanks::MelBanks(const MfccConfig &cfg) {
  const double nyquist = cfg.sample_rate_hz / 2.0;
  const double high = cfg.high_freq_hz > 0 ? cfg.high_freq_hz : nyquist;
  const double mel_low = MelScale(cfg.low_freq_hz);
  const double mel_high = MelScale(high);
  const int m = cfg.num_mel_filters;
  const double delta = (mel_high - mel_low) / (m + 1);
  const std::size_t num_bins = static_cast<std::size_t>(cfg.fft_size) / 2 + 1;
  const double bin_hz = static_cast<double>(cfg.sample_rate_hz) / cfg.fft_size;

  for (int i = 0; i < m; ++i) {
    const double left = mel_low + i * delta;
    const double center = left + delta;
    const double right = center + delta;
    centers_hz_.push_back(InverseMelScale(center));
    Filter filter{num_bins, {}};
    std::vector<double> weights(num_bins, 0.0);
    std::size_t last = 0;
    for (std::size_t k = 0; k < num_bins; ++k) {
      const double mel = MelScale(k * bin_hz);
      double w = 0.0;
      if (mel > left && mel <= center)
        w = (mel - left) / (center - left);
      else if (mel > center && mel < right)
        w = (right - mel) / (right - center);
      if (w > 0.0) {
        filter.first_bin = std::min(filter.first_bin, k);
        last = k;
      }
      weights[k] = w;
    }
    if (filter.first_bin == num_bins) {
      // Narrower than one FFT bin; such a filter contributes nothing.
      filter.first_bin = 0;
    } else {
      filter.weights.assign(weights.begin() + static_cast<std::ptrdiff_t>(filter.first_bin),
                            weights.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    }
    filters_.push_back(std::move(filter));
  }
}

void MelBanks::Compute(std::span<const double> power, std::span<double> energies) const {
  for (std::size_t i = 0; i < filters_.size(); ++i) {
    const Filter &f = filters_[i];
    energies[i] = f.weights.empty()
                      ? 0.0
                      : kernels::Dot(f.weights, power.subspan(f.first_bin, f.weights.size()));
  }
}

MfccComputer::MfccComputer(const MfccConfig &cfg)
    : cfg_((cfg.Validate(), cfg)),
      fft_(static_cast<std::size_t>(cfg.fft_size)),
      banks_(cfg) {
  const std::size_t len = cfg_.FrameLengthSamples();
  window_.resize(len);
  for (std::size_t n = 0; n < len; ++n)
    window_[n] = len == 1 ? 1.0
                          : 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * n / (len - 1));

  const int m = cfg_.num_mel_filters;
  dct_.Resize(static_cast<std::size_t>(cfg_.num_ceps), static_cast<std::size_t>(m));
  for (int k = 0; k < cfg_.num_ceps; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int j = 0; j < m; ++j)
      dct_(k, j) = scale * std::cos(std::numbers::pi * k * (j + 0.5) / m);
  }
  lifter_.assign(static_cast<std::size_t>(cfg_.num_ceps), 1.0);
  if (cfg_.lifter > 0.0)
    for (int k = 0; k < cfg_.num_ceps; ++k)
      lifter_[k] = 1.0 + 0.5 * cfg_.lifter * std::sin(std::numbers::pi * k / cfg_.lifter);
}

void MfccComputer::MelEnergies(std::span<const double> frame,
                               std::span<double> energies) const {
  std::vector<double> x(frame.begin(), frame.end());
  for (std::size_t i = x.size() - 1; i > 0; --i) x[i] -= cfg_.preemph_coeff * x[i - 1];
  x[0] -= cfg_.preemph_coeff * x[0];
  for (std::size_t i = 0; i < x.size(); ++i) x[i] *= window_[i];
  std::vector<double> power;
  fft_.PowerSpectrum(x, &power);
  banks_.Compute(power, energies);
}

void MfccComputer::ComputeFrame(std::span<const double> frame,
                                std::span<double> ceps) const {
  std::vector<double> energies(banks_.NumFilters());
  MelEnergies(frame, energies);
  for (double &e : energies) e = std::log(std::max(e, cfg_.log_floor));
  for (int k = 0; k < cfg_.num_ceps; ++k)
    ceps[k] = kernels::Dot(dct_.Row(k), energies) * lifter_[k];
}

FeatureMatrix MfccComputer::Compute(const AudioSegment &audio) const {
  if (audio.sample_rate_hz != cfg_.sample_rate_hz)
    throw ConfigError("audio " + audio.utt_id + " has sample rate " +
                      std::to_string(audio.sample_rate_hz) + ", expected " +
                      std::to_string(cfg_.sample_rate_hz));
  Matrix frames = FrameSignal(audio, cfg_);
  FeatureMatrix out;
  out.utt_id = audio.utt_id;
  out.kind = cfg_.kind;
  out.frame_shift_ms = static_cast<int>(std::lround(cfg_.frame_shift_ms));
  out.data.Resize(frames.NumRows(), static_cast<std::size_t>(cfg_.num_ceps));
  for (std::size_t f = 0; f < frames.NumRows(); ++f) ComputeFrame(frames.Row(f), out.data.Row(f));
  return out;
}

FeatureMatrix Mfcc(const AudioSegment &audio, const MfccConfig &cfg) {
  return MfccComputer(cfg).Compute(audio);
}

Matrix ComputeDeltas(const Matrix &x, int window) {
  if (window < 1) throw ConfigError("delta window must be >= 1");
  const auto rows = static_cast<std::ptrdiff_t>(x.NumRows());
  const std::size_t cols = x.NumCols();
  double denom = 0.0;
  for (int k = 1; k <= window; ++k) denom += 2.0 * k * k;
  Matrix out(x.NumRows(), cols);
  auto clamp_row = [rows](std::ptrdiff_t t) {
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(t, 0, rows - 1));
  };
  for (std::ptrdiff_t t = 0; t < rows; ++t) {
    auto out_row = out.Row(static_cast<std::size_t>(t));
    for (int k = 1; k <= window; ++k) {
      auto ahead = x.Row(clamp_row(t + k));
      auto behind = x.Row(clamp_row(t - k));
      for (std::size_t d = 0; d < cols; ++d) out_row[d] += k * (ahead[d] - behind[d]);
    }
    for (std::size_t d = 0; d < cols; ++d) out_row[d] /= denom;
  }
  return out;
}

FeatureMatrix AddDeltas(const FeatureMatrix &feats, int window) {
  if (feats.NumFrames() == 0) throw DataError("AddDeltas: no frames in " + feats.utt_id);
  if (feats.kind == FeatureKind::kMfcc13dd)
    throw ValidationError("AddDeltas: " + feats.utt_id + " already has deltas");
  Matrix delta = ComputeDeltas(feats.data, window);
  Matrix delta2 = ComputeDeltas(delta, window);
  const std::size_t dim = feats.Dim();
  FeatureMatrix out;
  out.utt_id = feats.utt_id;
  out.kind = feats.kind == FeatureKind::kMfcc13 ? FeatureKind::kMfcc13dd : feats.kind;
  out.frame_shift_ms = feats.frame_shift_ms;
  out.data.Resize(feats.NumFrames(), 3 * dim);
  for (std::size_t t = 0; t < feats.NumFrames(); ++t) {
    auto row = out.data.Row(t);
    std::copy_n(feats.data.Row(t).begin(), dim, row.begin());
    std::copy_n(delta.Row(t).begin(), dim, row.begin() + static_cast<std::ptrdiff_t>(dim));
    std::copy_n(delta2.Row(t).begin(), dim, row.begin() + static_cast<std::ptrdiff_t>(2 * dim));
  }
  return out;
}

}  // namespace mbnf
