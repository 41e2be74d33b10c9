// src/dsp/pitch.cc

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

#include "mbnf/dsp/pitch.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbnf/base/error.h"
#include "mbnf/dsp/mfcc.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {
namespace {

// Normalized cross-correlation between x[0, L-lag) and x[lag, L).
double NormalizedCorrelation(std::span<const double> x, std::size_t lag) {
  const std::size_t n = x.size() - lag;
  std::span<const double> head = x.first(n);
  std::span<const double> tail = x.subspan(lag, n);
  double cross = kernels::Dot(head, tail);
  double e0 = kernels::Dot(head, head);
  double e1 = kernels::Dot(tail, tail);
  double denom = std::sqrt(e0 * e1);
  if (denom < 1e-20) return 0.0;
  return cross / denom;
}

PitchFrame AnalyzeFrame(std::span<const double> raw, int sample_rate,
                        const PitchConfig &cfg) {
  std::vector<double> x(raw.begin(), raw.end());
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  for (double &v : x) v -= mean;

  const auto min_lag = static_cast<std::size_t>(std::ceil(sample_rate / cfg.max_f0_hz));
  auto max_lag = static_cast<std::size_t>(std::floor(sample_rate / cfg.min_f0_hz));
  max_lag = std::min(max_lag, x.size() - 2);
  PitchFrame result;
  if (min_lag < 1 || min_lag > max_lag) return result;

  // One extra lag on each side for peak tests and interpolation.
  const std::size_t lo = min_lag - 1;
  const std::size_t hi = max_lag + 1;
  std::vector<double> r(hi - lo + 1);
  for (std::size_t lag = lo; lag <= hi; ++lag) r[lag - lo] = NormalizedCorrelation(x, lag);

  std::size_t best = min_lag;
  for (std::size_t lag = min_lag; lag <= max_lag; ++lag)
    if (r[lag - lo] > r[best - lo]) best = lag;
  if (r[best - lo] <= 0.0) return result;

  std::size_t chosen = best;
  const double threshold = cfg.octave_tolerance * r[best - lo];
  for (std::size_t lag = min_lag; lag < best; ++lag) {
    double v = r[lag - lo];
    if (v >= threshold && v >= r[lag - lo - 1] && v >= r[lag - lo + 1]) {
      chosen = lag;
      break;
    }
  }

  const double left = r[chosen - lo - 1];
  const double mid = r[chosen - lo];
  const double right = r[chosen - lo + 1];
  double offset = 0.0;
  const double curvature = left - 2.0 * mid + right;
  if (curvature < 0.0) offset = std::clamp(0.5 * (left - right) / curvature, -0.5, 0.5);
  result.pov = std::clamp(mid, 0.0, 1.0);
  result.f0_hz = sample_rate / (static_cast<double>(chosen) + offset);
  return result;
}

}  // namespace

std::vector<PitchFrame> TrackPitch(const AudioSegment &audio, const PitchConfig &cfg) {
  MfccConfig framing;
  framing.sample_rate_hz = audio.sample_rate_hz;
  framing.frame_len_ms = cfg.frame_len_ms;
  framing.frame_shift_ms = cfg.frame_shift_ms;
  Matrix frames = FrameSignal(audio, framing);
  std::vector<PitchFrame> out(frames.NumRows());
  for (std::size_t f = 0; f < frames.NumRows(); ++f)
    out[f] = AnalyzeFrame(frames.Row(f), audio.sample_rate_hz, cfg);
  return out;
}

FeatureMatrix Pitch3(const AudioSegment &audio, const PitchConfig &cfg) {
  std::vector<PitchFrame> track = TrackPitch(audio, cfg);
  const std::size_t n = track.size();

  std::vector<std::size_t> voiced;
  for (std::size_t t = 0; t < n; ++t)
    if (track[t].pov >= cfg.voicing_threshold && track[t].f0_hz > 0.0) voiced.push_back(t);

  std::vector<double> log_f0(n, 0.0);
  if (!voiced.empty()) {
    double mean = 0.0;
    for (std::size_t t : voiced) mean += std::log(track[t].f0_hz);
    mean /= static_cast<double>(voiced.size());
    for (std::size_t t : voiced) log_f0[t] = std::log(track[t].f0_hz) - mean;
    // Fill unvoiced frames: hold at the edges, interpolate in between.
    for (std::size_t t = 0; t < voiced.front(); ++t) log_f0[t] = log_f0[voiced.front()];
    for (std::size_t t = voiced.back() + 1; t < n; ++t) log_f0[t] = log_f0[voiced.back()];
    for (std::size_t i = 0; i + 1 < voiced.size(); ++i) {
      std::size_t a = voiced[i], b = voiced[i + 1];
      for (std::size_t t = a + 1; t < b; ++t) {
        double w = static_cast<double>(t - a) / static_cast<double>(b - a);
        log_f0[t] = (1.0 - w) * log_f0[a] + w * log_f0[b];
      }
    }
  }

  Matrix column(n, 1);
  for (std::size_t t = 0; t < n; ++t) column(t, 0) = log_f0[t];
  Matrix delta = ComputeDeltas(column, cfg.delta_window);

  FeatureMatrix out;
  out.utt_id = audio.utt_id;
  out.kind = FeatureKind::kPitch3;
  out.frame_shift_ms = static_cast<int>(std::lround(cfg.frame_shift_ms));
  out.data.Resize(n, 3);
  for (std::size_t t = 0; t < n; ++t) {
    out.data(t, 0) = track[t].pov;
    out.data(t, 1) = log_f0[t];
    out.data(t, 2) = delta(t, 0);
  }
  return out;
}

}  // namespace mbnf
