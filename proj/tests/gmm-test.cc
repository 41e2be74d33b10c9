// tests/gmm-test.cc

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
#include "mbnf/gmm/gmm-em.h"
#include "mbnf/gmm/ivector.h"

namespace mbnf {
namespace {

Matrix Gaussian(Rng &rng, std::size_t n, std::vector<double> mean, double sd) {
  Matrix m(n, mean.size());
  for (std::size_t t = 0; t < n; t++)
    for (std::size_t e = 0; e < mean.size(); e++) m(t, e) = mean[e] + sd * rng.Gauss();
  return m;
}

DiagGmm RandomGmm(Rng &rng, int c, int d) {
  std::vector<double> w(c);
  double s = 0;
  for (double &v : w) s += (v = rng.Uniform(0.1, 1.0));
  for (double &v : w) v /= s;
  Matrix mu(c, d), var(c, d);
  for (double &v : mu.Values()) v = rng.Uniform(-2, 2);
  for (double &v : var.Values()) v = rng.Uniform(0.5, 2);
  return DiagGmm(w, mu, var);
}

// Direct sum of weighted densities, no log-sum-exp.
double NaiveLogLik(const DiagGmm &g, std::span<const double> x) {
  double p = 0;
  for (int c = 0; c < g.NumComp(); c++) {
    double dens = g.weights()[c];
    for (int e = 0; e < g.Dim(); e++) {
      double v = g.vars()(c, e), z = x[e] - g.means()(c, e);
      dens *= std::exp(-0.5 * z * z / v) / std::sqrt(2 * std::numbers::pi * v);
    }
    p += dens;
  }
  return std::log(p);
}

TEST(DiagGmmTest, StandardNormalAtOrigin) {
  for (int d : {1, 3, 13}) {
    DiagGmm g({1.0}, Matrix(1, d), Matrix(1, d, 1.0));
    std::vector<double> x(d, 0.0);
    EXPECT_NEAR(g.LogLik(x), -0.5 * d * std::log(2 * std::numbers::pi), 1e-12);
  }
}

TEST(DiagGmmTest, MatchesNaiveSummation) {
  Rng rng(1);
  for (int trial = 0; trial < 200; trial++) {
    DiagGmm g = RandomGmm(rng, rng.UniformInt(1, 5), rng.UniformInt(1, 4));
    std::vector<double> x(g.Dim());
    for (double &v : x) v = rng.Uniform(-3, 3);
    EXPECT_NEAR(g.LogLik(x), NaiveLogLik(g, x), 1e-10);
  }
}

TEST(DiagGmmTest, ZeroWeightComponentIgnored) {
  Matrix mu(2, 2, std::vector<double>{0, 1, 5, 5}), var(2, 2, 1.0);
  DiagGmm both({1.0, 0.0}, mu, var);
  DiagGmm one({1.0}, Matrix(1, 2, std::vector<double>{0, 1}), Matrix(1, 2, 1.0));
  std::vector<double> x = {0.3, -0.2};
  EXPECT_DOUBLE_EQ(both.LogLik(x), one.LogLik(x));
  EXPECT_THROW(both.LogLik(std::vector<double>{1.0}), DimensionError);
}

TEST(DiagGmmTest, PosteriorsAreSimplex) {
  Rng rng(2);
  for (int trial = 0; trial < 100; trial++) {
    DiagGmm g = RandomGmm(rng, 4, 3);
    std::vector<double> x = {rng.Uniform(-9, 9), rng.Uniform(-9, 9), rng.Uniform(-9, 9)};
    std::vector<double> post(4);
    g.Posteriors(x, post);
    double s = 0;
    for (double p : post) {
      EXPECT_GE(p, 0.0);
      s += p;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(GmmEm, SingleComponentClosedForm) {
  Rng rng(3);
  Matrix x = Gaussian(rng, 300, {1.0, -2.0, 0.0}, 1.5);
  for (std::size_t t = 0; t < 300; t++) x(t, 2) = 0.7;  // zero variance column
  GmmEmOptions opts;
  opts.num_comp = 1;
  opts.iters = 3;
  GmmEmResult r = EmFitGmm({&x}, opts);
  for (int e = 0; e < 3; e++) {
    double mean = 0, var = 0;
    for (std::size_t t = 0; t < 300; t++) mean += x(t, e);
    mean /= 300;
    for (std::size_t t = 0; t < 300; t++) var += (x(t, e) - mean) * (x(t, e) - mean);
    var = std::max(var / 300, 1e-3);
    EXPECT_NEAR(r.gmm.means()(0, e), mean, 1e-12);
    EXPECT_NEAR(r.gmm.vars()(0, e), var, 1e-12);
  }
  EXPECT_EQ(r.gmm.weights()[0], 1.0);
  EXPECT_EQ(r.gmm.vars()(0, 2), 1e-3);
}

TEST(GmmEm, SeparatedClusters) {
  Rng rng(4);
  Matrix a = Gaussian(rng, 400, {-10.0}, 1.0), b = Gaussian(rng, 400, {10.0}, 1.0);
  GmmEmOptions opts;
  opts.num_comp = 2;
  opts.iters = 10;
  opts.seed = 4;
  DiagGmm g = EmFitGmm({&a, &b}, opts).gmm;
  double lo = std::min(g.means()(0, 0), g.means()(1, 0));
  double hi = std::max(g.means()(0, 0), g.means()(1, 0));
  EXPECT_NEAR(lo, -10.0, 0.2);
  EXPECT_NEAR(hi, 10.0, 0.2);
}

TEST(GmmEm, ZeroItersReturnsInitialization) {
  Rng rng(5);
  Matrix x = Gaussian(rng, 200, {0.0, 1.0}, 1.0);
  GmmEmOptions opts;
  opts.num_comp = 3;
  opts.iters = 0;
  opts.seed = 9;
  GmmEmResult r = EmFitGmm({&x}, opts);
  EXPECT_EQ(r.gmm, KMeansInitGmm({&x}, opts));
  EXPECT_EQ(r.loglik.size(), 1u);
}

TEST(GmmEm, MonotoneAndDeterministic) {
  for (std::uint64_t seed = 0; seed < 5; seed++) {
    Rng rng(seed);
    Matrix a = Gaussian(rng, 300, {0, 0, 0}, 1.0), b = Gaussian(rng, 200, {2, -1, 3}, 0.7);
    GmmEmOptions opts;
    opts.num_comp = 4;
    opts.iters = 15;
    opts.seed = seed;
    GmmEmResult r = EmFitGmm({&a, &b}, opts);
    ASSERT_EQ(r.loglik.size(), 16u);
    for (std::size_t i = 1; i < r.loglik.size(); i++)
      EXPECT_GE(r.loglik[i] - r.loglik[i - 1], -1e-8) << "seed " << seed << " it " << i;
    EXPECT_NO_THROW(r.gmm.Validate());
    opts.num_jobs = 3;
    EXPECT_EQ(EmFitGmm({&a, &b}, opts).gmm, r.gmm);
  }
}

TEST(GmmEm, ErrorsOnEmptyOrTooFewFrames) {
  Matrix empty;
  GmmEmOptions opts;
  EXPECT_THROW(EmFitGmm({&empty}, opts), DataError);
  Matrix two(2, 1, 0.0);
  opts.num_comp = 3;
  EXPECT_THROW(EmFitGmm({&two}, opts), DataError);
}

TEST(BwStatsTest, Properties) {
  Rng rng(6);
  DiagGmm g = RandomGmm(rng, 3, 2);
  EXPECT_EQ(AccumulateBwStats(g, Matrix()).zeroth, std::vector<double>(3, 0.0));
  Matrix x = Gaussian(rng, 57, {0, 0}, 2.0);
  BwStats s = AccumulateBwStats(g, x);
  double n = 0;
  for (double v : s.zeroth) n += v;
  EXPECT_NEAR(n, 57.0, 1e-6);
  // Single frame on a dominant component's mean.
  DiagGmm sharp({0.5, 0.5}, Matrix(2, 1, std::vector<double>{0.0, 100.0}), Matrix(2, 1, 1.0));
  BwStats one = AccumulateBwStats(sharp, Matrix(1, 1, 0.0));
  EXPECT_NEAR(one.first(0, 0), 0.0, 1e-12);
  EXPECT_THROW(AccumulateBwStats(g, Matrix(2, 5)), DimensionError);
}

TEST(Ivector, ScalarClosedForm) {
  const double t = 0.8, v = 2.5, f = 1.7;
  TvModel m;
  m.ubm = DiagGmm({1.0}, Matrix(1, 1), Matrix(1, 1, v));
  m.t = Matrix(1, 1, t);
  BwStats s(1, 1);
  s.zeroth[0] = 1.0;
  s.first(0, 0) = f;
  IvectorPosterior p = ComputeIvectorPosterior(m, s);
  EXPECT_NEAR(p.mean[0], (t * f / v) / (1.0 + t * t / v), 1e-14);
}

TEST(Ivector, ZeroStatsAndZeroT) {
  Rng rng(7);
  TvModel m;
  m.ubm = RandomGmm(rng, 3, 2);
  m.t = Matrix(6, 4);
  for (double &v : m.t.Values()) v = rng.Gauss();
  BwStats zero(3, 2);
  for (double w : ComputeIvectorPosterior(m, zero).mean) EXPECT_EQ(w, 0.0);
  Matrix x = Gaussian(rng, 20, {1, 1}, 1.0);
  m.t.SetZero();
  for (double w : ExtractIvector(m, x)) EXPECT_EQ(w, 0.0);
}

TEST(Ivector, SolvesNormalEquations) {
  Rng rng(8);
  TvModel m;
  m.ubm = RandomGmm(rng, 4, 3);
  m.t = Matrix(12, 5);
  for (double &v : m.t.Values()) v = rng.Gauss();
  for (int trial = 0; trial < 20; trial++) {
    Matrix x = Gaussian(rng, 40, {rng.Gauss(), rng.Gauss(), rng.Gauss()}, 1.0);
    IvectorPosterior p = ComputeIvectorPosterior(m, AccumulateBwStats(m.ubm, x));
    for (int i = 0; i < 5; i++) {
      double lw = 0;
      for (int j = 0; j < 5; j++) lw += p.precision(i, j) * p.mean[j];
      EXPECT_LT(std::abs(lw - p.linear[i]), 1e-8);
    }
  }
}

// Stats of utterances drawn from a 1-component model with x = mu + T w + noise.
std::vector<BwStats> PlantedStats(const std::vector<double> &direction, int utts,
                                  std::uint64_t seed) {
  Rng rng(seed);
  const int d = static_cast<int>(direction.size());
  std::vector<BwStats> out;
  for (int u = 0; u < utts; u++) {
    double w = rng.Gauss();
    BwStats s(1, d);
    int frames = 30;
    for (int t = 0; t < frames; t++)
      for (int e = 0; e < d; e++) s.first(0, e) += direction[e] * w + 0.3 * rng.Gauss();
    s.zeroth[0] = frames;
    s.total_frames = frames;
    out.push_back(s);
  }
  return out;
}

TEST(TMatrix, RecoversPlantedDirection) {
  std::vector<double> dir = {2.0, -1.0, 0.5, 1.5};
  DiagGmm ubm({1.0}, Matrix(1, 4), Matrix(1, 4, 0.09));
  TMatrixOptions opts;
  opts.ivec_dim = 1;
  opts.iters = 20;
  opts.seed = 3;
  TMatrixResult r = TrainTMatrix(ubm, PlantedStats(dir, 200, 11), opts);
  double dot = 0, n1 = 0, n2 = 0;
  for (int e = 0; e < 4; e++) {
    dot += dir[e] * r.model.t(e, 0);
    n1 += dir[e] * dir[e];
    n2 += r.model.t(e, 0) * r.model.t(e, 0);
  }
  EXPECT_GT(std::abs(dot) / std::sqrt(n1 * n2), 0.9);
}

TEST(TMatrix, MonotoneDeterministicAndValidated) {
  Rng rng(9);
  DiagGmm ubm = RandomGmm(rng, 3, 2);
  std::vector<BwStats> stats;
  for (int u = 0; u < 12; u++)
    stats.push_back(AccumulateBwStats(ubm, Gaussian(rng, 25, {rng.Gauss(), rng.Gauss()}, 1.0)));
  TMatrixOptions opts;
  opts.ivec_dim = 2;
  opts.iters = 10;
  opts.seed = 5;
  TMatrixResult a = TrainTMatrix(ubm, stats, opts);
  ASSERT_EQ(a.objective.size(), 11u);
  for (std::size_t i = 1; i < a.objective.size(); i++)
    EXPECT_GE(a.objective[i] - a.objective[i - 1], -1e-6);
  EXPECT_EQ(TrainTMatrix(ubm, stats, opts).model.t, a.model.t);

  opts.iters = 0;
  TMatrixResult init = TrainTMatrix(ubm, stats, opts);
  Rng again(SubSeed(5, 0x7476));
  EXPECT_NEAR(init.model.t(0, 0), 0.1 * again.Gauss(), 0.0);

  opts.ivec_dim = 6;
  EXPECT_THROW(TrainTMatrix(ubm, stats, opts), ConfigError);
  opts.ivec_dim = 2;
  EXPECT_THROW(TrainTMatrix(ubm, {stats[0]}, opts), DataError);
}

}  // namespace
}  // namespace mbnf
