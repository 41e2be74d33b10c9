// tests/dsp-test.cc

// Copyright 2026  The mbnf Authors

// See ../LICENSE for clarification regarding multiple authors
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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"
#include "mbnf/dsp/mfcc.h"
#include "mbnf/dsp/perturb.h"
#include "mbnf/dsp/pitch.h"
#include "oracle/mfcc-oracle.h"

namespace mbnf {
namespace {

AudioSegment Sine(double hz, std::size_t n, double amp = 1.0) {
  AudioSegment a;
  a.utt_id = "sine";
  for (std::size_t i = 0; i < n; i++)
    a.samples.push_back(amp * std::sin(2.0 * std::numbers::pi * hz * i / 16000.0));
  return a;
}

AudioSegment Noise(std::uint64_t seed, std::size_t n, double std = 0.3) {
  Rng rng(seed);
  AudioSegment a;
  a.utt_id = "noise";
  for (std::size_t i = 0; i < n; i++) a.samples.push_back(std::clamp(std * rng.Gauss(), -1.0, 1.0));
  return a;
}

TEST(Framing, CountsFollowFormula) {
  MfccConfig cfg;
  EXPECT_EQ(FrameSignal(Sine(100, 16000), cfg).NumRows(), 98u);
  Matrix one = FrameSignal(Sine(100, 400), cfg);
  EXPECT_EQ(one.NumRows(), 1u);
  EXPECT_EQ(one.NumCols(), 400u);
  EXPECT_THROW(FrameSignal(Sine(100, 399), cfg), DataError);
}

TEST(Framing, RandomTriples) {
  Rng rng(5);
  for (int i = 0; i < 500; i++) {
    std::size_t len = rng.UniformInt(1, 600), shift = rng.UniformInt(1, 600);
    std::size_t n = rng.UniformInt(0, 5000);
    std::size_t expected = 0;
    // Count frame starts directly.
    for (std::size_t s = 0; s + len <= n; s += shift) expected++;
    EXPECT_EQ(NumFrames(n, len, shift), expected);
  }
}

TEST(Mfcc, ZeroSignalGivesScaledLogFloor) {
  for (MfccConfig cfg : {MfccConfig::Mfcc13(), MfccConfig::Mfcc40()}) {
    FeatureMatrix f = Mfcc(Sine(0, 1600, 0.0), cfg);
    double m = cfg.num_mel_filters;
    for (std::size_t t = 0; t < f.NumFrames(); t++) {
      EXPECT_NEAR(f.data(t, 0), std::sqrt(m) * std::log(1e-10), 1e-9);
      for (std::size_t k = 1; k < f.Dim(); k++) EXPECT_NEAR(f.data(t, k), 0.0, 1e-9);
    }
  }
}

TEST(Mfcc, KiloHertzSineEnergyNearOneKiloHertz) {
  MfccComputer mfcc(MfccConfig::Mfcc40());
  AudioSegment a = Sine(1000, 400);
  std::vector<double> e(40);
  mfcc.MelEnergies(a.samples, e);
  std::size_t best = std::max_element(e.begin(), e.end()) - e.begin();
  const MelBanks &banks = mfcc.banks();
  double lo = best > 0 ? banks.CenterHz(best - 1) : 0.0;
  double hi = best + 1 < 40 ? banks.CenterHz(best + 1) : 8000.0;
  EXPECT_LT(lo, 1000.0);
  EXPECT_GT(hi, 1000.0);

  oracle::MfccParams p;
  p.num_filters = 40;
  p.num_ceps = 40;
  p.lifter = 0;
  std::vector<double> ref = oracle::MelEnergies(p, a.samples);
  for (int i = 0; i < 40; i++) EXPECT_TRUE(oracle::CloseRel(e[i], ref[i], 1e-6)) << i;
}

TEST(Mfcc, MatchesNaiveDftOracle) {
  Rng rng(21);
  for (int c = 0; c < 20; c++) {
    bool hires = c % 2 == 1;
    MfccConfig cfg = hires ? MfccConfig::Mfcc40() : MfccConfig::Mfcc13();
    oracle::MfccParams p;
    p.num_filters = cfg.num_mel_filters;
    p.num_ceps = cfg.num_ceps;
    p.lifter = cfg.lifter;
    AudioSegment a;
    std::size_t n = rng.UniformInt(400, 1400);
    for (std::size_t i = 0; i < n; i++) a.samples.push_back(rng.Uniform(-1.0, 1.0));
    FeatureMatrix got = Mfcc(a, cfg);
    auto want = oracle::Mfcc(p, a.samples);
    ASSERT_EQ(got.NumFrames(), want.size());
    for (std::size_t t = 0; t < want.size(); t++)
      for (std::size_t k = 0; k < want[t].size(); k++)
        ASSERT_TRUE(oracle::CloseRel(got.data(t, k), want[t][k], 1e-6))
            << "case " << c << " frame " << t << " coef " << k;
  }
}

TEST(Deltas, ConstantAndSingleFrameAreZero) {
  FeatureMatrix f;
  f.kind = FeatureKind::kMfcc13;
  f.data = Matrix(7, 13, 2.5);
  FeatureMatrix d = AddDeltas(f);
  EXPECT_EQ(d.Dim(), 39u);
  EXPECT_EQ(d.kind, FeatureKind::kMfcc13dd);
  for (std::size_t t = 0; t < 7; t++)
    for (std::size_t k = 13; k < 39; k++) EXPECT_EQ(d.data(t, k), 0.0);
  f.data = Matrix(1, 13, -1.0);
  d = AddDeltas(f);
  for (std::size_t k = 13; k < 39; k++) EXPECT_EQ(d.data(0, k), 0.0);
}

TEST(Deltas, Linear) {
  Rng rng(8);
  Matrix x(20, 5), y(20, 5), z(20, 5);
  for (double &v : x.Values()) v = rng.Gauss();
  for (double &v : y.Values()) v = rng.Gauss();
  for (std::size_t i = 0; i < z.Size(); i++) z.Data()[i] = 2.0 * x.Data()[i] - 3.0 * y.Data()[i];
  Matrix dx = ComputeDeltas(x), dy = ComputeDeltas(y), dz = ComputeDeltas(z);
  for (std::size_t i = 0; i < dz.Size(); i++)
    EXPECT_NEAR(dz.Data()[i], 2.0 * dx.Data()[i] - 3.0 * dy.Data()[i], 1e-9);
}

TEST(Deltas, RegressionFormulaInInterior) {
  Matrix x(9, 1);
  for (std::size_t t = 0; t < 9; t++) x(t, 0) = static_cast<double>(t * t);
  Matrix d = ComputeDeltas(x, 2);
  // (1*(x5-x3) + 2*(x6-x2)) / 10 at t = 4.
  EXPECT_NEAR(d(4, 0), (1.0 * (25 - 9) + 2.0 * (36 - 4)) / 10.0, 1e-12);
}

TEST(Pitch, PureSineTracked) {
  std::vector<PitchFrame> frames = TrackPitch(Sine(200, 16000, 0.5));
  ASSERT_EQ(frames.size(), 98u);
  for (const auto &f : frames) {
    EXPECT_GE(f.f0_hz, 195.0);
    EXPECT_LE(f.f0_hz, 205.0);
    EXPECT_GT(f.pov, 0.9);
  }
  FeatureMatrix p = Pitch3(Sine(200, 16000, 0.5));
  EXPECT_EQ(p.Dim(), 3u);
  EXPECT_EQ(p.kind, FeatureKind::kPitch3);
}

TEST(Pitch, SilenceHasNoVoicing) {
  FeatureMatrix p = Pitch3(Sine(0, 4000, 0.0));
  for (std::size_t t = 0; t < p.NumFrames(); t++) {
    EXPECT_EQ(p.data(t, 0), 0.0);
    EXPECT_EQ(p.data(t, 1), 0.0);
    EXPECT_EQ(p.data(t, 2), 0.0);
  }
}

TEST(Pitch, WhiteNoiseIsMostlyUnvoiced) {
  FeatureMatrix p = Pitch3(Noise(99, 16000));
  double mean = 0;
  for (std::size_t t = 0; t < p.NumFrames(); t++) mean += p.data(t, 0);
  mean /= p.NumFrames();
  EXPECT_LT(mean, 0.5);
}

TEST(SpeedPerturb, IdentityAndLength) {
  AudioSegment a = Noise(1, 16000);
  EXPECT_EQ(SpeedPerturb(a, 1.0).samples, a.samples);
  EXPECT_EQ(SpeedPerturb(a, 0.9).samples.size(), 17778u);
  EXPECT_EQ(SpeedPerturb(a, 1.1).samples.size(), 14545u);
  EXPECT_THROW(SpeedPerturb(a, 0.0), ConfigError);
  EXPECT_THROW(SpeedPerturb(a, -1.0), ConfigError);
}

TEST(SpeedPerturb, RaisesPitch) {
  std::vector<PitchFrame> frames = TrackPitch(SpeedPerturb(Sine(200, 16000, 0.5), 1.1));
  for (const auto &f : frames) {
    EXPECT_GE(f.f0_hz, 215.0);
    EXPECT_LE(f.f0_hz, 225.0);
  }
}

TEST(FeatureMatrix, RejectsNonFinite) {
  FeatureMatrix f;
  f.kind = FeatureKind::kMfcc40;
  f.data = Matrix(2, 40);
  f.data(1, 3) = std::nan("");
  EXPECT_THROW(f.Validate(), Error);
}

}  // namespace
}  // namespace mbnf
