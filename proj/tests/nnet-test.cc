// tests/nnet-test.cc

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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"
#include "mbnf/corpus/synth.h"
#include "mbnf/nnet/block-softmax-net.h"
#include "mbnf/nnet/features.h"
#include "mbnf/nnet/nnet-train.h"
#include "mbnf/nnet/probe.h"
#include "oracle/nnet-oracle.h"

namespace mbnf {
namespace {

Matrix RandomMatrix(std::size_t rows, std::size_t cols, Rng *rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double &v : m.Values()) v = scale * rng->Gauss();
  return m;
}

TEST(Splice, IdentityOffsets) {
  Rng rng(1);
  Matrix x = RandomMatrix(7, 3, &rng);
  std::vector<int> zero{0};
  EXPECT_EQ(Splice(x, zero), x);
}

TEST(Splice, SingleFrameReplicated) {
  Matrix x(1, 2, std::vector<double>{3.0, -1.0});
  std::vector<int> ctx{-1, 0, 1};
  Matrix y = Splice(x, ctx);
  ASSERT_EQ(y.NumRows(), 1u);
  EXPECT_EQ(std::vector<double>(y.Values().begin(), y.Values().end()),
            (std::vector<double>{3, -1, 3, -1, 3, -1}));
}

TEST(Splice, OutputDimAndEdges) {
  Rng rng(2);
  Matrix x = RandomMatrix(10, 43, &rng);
  std::vector<int> ctx{-2, -1, 0, 1, 2};
  Matrix y = Splice(x, ctx);
  ASSERT_EQ(y.NumCols(), 215u);
  ASSERT_EQ(y.NumRows(), 10u);
  for (std::size_t t = 0; t < 10; t++)
    for (std::size_t k = 0; k < 5; k++) {
      long src = std::clamp<long>(static_cast<long>(t) + ctx[k], 0, 9);
      for (std::size_t d = 0; d < 43; d++) ASSERT_EQ(y(t, k * 43 + d), x(src, d));
    }
}

NetSpec SmallSpec(std::uint64_t seed) {
  NetSpec s;
  s.feat_dim = 2;
  s.hidden_dim = 4;
  s.num_hidden = 2;
  s.contexts = {{-1, 0, 1}, {-1, 0, 1}};
  s.bottleneck_dim = 3;
  s.blocks = {{"aa", 3}, {"bb", 2}};
  s.seed = seed;
  return s;
}

TEST(BlockSoftmaxNet, InitShapesAndDeterminism) {
  NetSpec s;
  s.feat_dim = 43;
  s.hidden_dim = 64;
  s.num_hidden = 3;
  s.contexts = NetSpec::DefaultContexts(3);
  s.bottleneck_dim = 8;
  s.blocks = {{"zul", 30}, {"sot", 24}};
  s.seed = 11;
  BlockSoftmaxNet a(s), b(s);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.hidden()[0].weight.NumRows(), 64u);
  EXPECT_EQ(a.hidden()[0].weight.NumCols(), 215u);
  EXPECT_EQ(a.outputs()[0].weight.NumRows(), 30u);
  EXPECT_EQ(a.outputs()[1].weight.NumRows(), 24u);
  EXPECT_EQ(a.outputs()[1].weight.NumCols(), 8u);
  for (double v : a.hidden()[0].bias.Values()) EXPECT_EQ(v, 0.0);
  s.seed = 12;
  EXPECT_FALSE(a == BlockSoftmaxNet(s));
}

TEST(BlockSoftmaxNet, HeInitScale) {
  NetSpec s = SmallSpec(3);
  s.feat_dim = 40;
  s.hidden_dim = 200;
  BlockSoftmaxNet net(s);
  const Matrix &w = net.hidden()[0].weight;
  double ss = 0.0;
  for (double v : w.Values()) ss += v * v;
  double var = ss / w.Size();
  EXPECT_NEAR(var, 2.0 / 120.0, 0.1 * 2.0 / 120.0);
}

TEST(BlockSoftmaxNet, InvalidSpecIsConfigError) {
  NetSpec s = SmallSpec(1);
  s.blocks[1].size = 0;
  EXPECT_THROW(BlockSoftmaxNet{s}, ConfigError);
  s = SmallSpec(1);
  s.contexts[1] = {1, 0};
  EXPECT_THROW(BlockSoftmaxNet{s}, ConfigError);
  s = SmallSpec(1);
  s.contexts.pop_back();
  EXPECT_THROW(BlockSoftmaxNet{s}, ConfigError);
}

TEST(BlockSoftmaxNet, ZeroNetUniformPosteriorsAndZeroBnf) {
  BlockSoftmaxNet net(SmallSpec(4));
  net.SetZero();
  Rng rng(5);
  Matrix in = RandomMatrix(9, net.spec().InputDim(), &rng);
  Matrix bnf;
  std::vector<Matrix> post;
  net.Forward(in, -1, &bnf, &post);
  ASSERT_EQ(bnf.NumRows(), 9u - 2u);
  for (double v : bnf.Values()) EXPECT_EQ(v, 0.0);
  for (std::size_t b = 0; b < 2; b++)
    for (double v : post[b].Values())
      EXPECT_DOUBLE_EQ(v, 1.0 / net.spec().blocks[b].size);
}

TEST(BlockSoftmaxNet, SingleBlockForward) {
  BlockSoftmaxNet net(SmallSpec(6));
  Rng rng(7);
  Matrix in = RandomMatrix(6, net.spec().InputDim(), &rng);
  std::vector<Matrix> only, all;
  net.Forward(in, 1, nullptr, &only);
  net.Forward(in, -1, nullptr, &all);
  EXPECT_TRUE(only[0].Empty());
  EXPECT_EQ(only[1], all[1]);
  Matrix bad(3, net.spec().InputDim() + 1);
  EXPECT_THROW(net.Forward(bad, -1, nullptr, &all), DimensionError);
}

TEST(BlockSoftmaxNet, BlockNormalization) {
  for (std::uint64_t seed = 0; seed < 100; seed++) {
    Rng rng(seed + 100);
    NetSpec s = SmallSpec(seed);
    s.blocks = {{"a", rng.UniformInt(1, 6)}, {"b", rng.UniformInt(1, 6)},
                {"c", rng.UniformInt(1, 6)}};
    BlockSoftmaxNet net(s);
    for (Matrix *p : net.Params())
      for (double &v : p->Values()) v = 3.0 * rng.Gauss();
    Matrix in = RandomMatrix(8, s.InputDim(), &rng, 4.0);
    std::vector<Matrix> post;
    net.Forward(in, -1, nullptr, &post);
    for (const Matrix &p : post)
      for (std::size_t r = 0; r < p.NumRows(); r++) {
        double sum = 0.0;
        for (double v : p.Row(r)) {
          EXPECT_GE(v, 0.0);
          sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-6);
      }
  }
}

TEST(BlockSoftmaxNet, MatchesHandComputedChain) {
  NetSpec s;
  s.feat_dim = 2;
  s.hidden_dim = 2;
  s.num_hidden = 1;
  s.contexts = {{0}};
  s.bottleneck_dim = 2;
  s.blocks = {{"x", 2}};
  BlockSoftmaxNet net(s);
  net.hidden()[0].weight = Matrix(2, 2, std::vector<double>{1.0, -2.0, 0.5, 0.25});
  net.hidden()[0].bias = Matrix(1, 2, std::vector<double>{0.1, -0.3});
  net.bottleneck().weight = Matrix(2, 2, std::vector<double>{2.0, 0.0, -1.0, 1.0});
  net.bottleneck().bias = Matrix(1, 2, std::vector<double>{0.0, 0.5});
  net.outputs()[0].weight = Matrix(2, 2, std::vector<double>{1.0, 1.0, 0.0, -1.0});
  net.outputs()[0].bias = Matrix(1, 2, std::vector<double>{0.2, 0.0});
  Matrix in(1, 2, std::vector<double>{0.6, 0.1});
  // h = relu([0.6 - 0.2 + 0.1, 0.3 + 0.025 - 0.3]) = [0.5, 0.025]
  // e = [1.0, -0.5 + 0.025 + 0.5] = [1.0, 0.025]
  // y = [1.025 + 0.2, -0.025]
  Matrix bnf;
  std::vector<Matrix> post;
  net.Forward(in, 0, &bnf, &post);
  EXPECT_NEAR(bnf(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(bnf(0, 1), 0.025, 1e-12);
  double y0 = 1.225, y1 = -0.025;
  double p0 = 1.0 / (1.0 + std::exp(y1 - y0));
  EXPECT_NEAR(post[0](0, 0), p0, 1e-12);
  EXPECT_NEAR(post[0](0, 1), 1.0 - p0, 1e-12);
}

TrainBatch RandomBatch(const BlockSoftmaxNet &net, int block, Rng *rng) {
  TrainBatch batch;
  batch.block = block;
  const int ctx = net.spec().InnerLeftContext() + net.spec().InnerRightContext();
  for (int c = 0; c < 2; c++) {
    int frames = rng->UniformInt(1, 4);
    TrainChunk chunk{RandomMatrix(frames + ctx, net.spec().InputDim(), rng), {}};
    for (int t = 0; t < frames; t++)
      chunk.targets.push_back(rng->UniformInt(0, net.spec().blocks[block].size - 1));
    batch.chunks.push_back(std::move(chunk));
  }
  batch.chunks[0].targets[0] = -1;
  return batch;
}

TEST(Training, ZeroNetLossIsLogK) {
  BlockSoftmaxNet net(SmallSpec(8));
  net.SetZero();
  Rng rng(9);
  for (int b = 0; b < 2; b++)
    EXPECT_DOUBLE_EQ(ComputeLoss(net, RandomBatch(net, b, &rng)),
                     std::log(static_cast<double>(net.spec().blocks[b].size)));
}

TEST(Training, NonOwningBlockGradientIsZeroAndUnchanged) {
  for (std::uint64_t seed = 0; seed < 20; seed++) {
    BlockSoftmaxNet net(SmallSpec(seed));
    Rng rng(seed);
    int block = static_cast<int>(seed % 2);
    TrainBatch batch = RandomBatch(net, block, &rng);
    BlockSoftmaxNet grad;
    ComputeLossAndGradient(net, batch, &grad);
    for (double v : grad.outputs()[1 - block].weight.Values()) ASSERT_EQ(v, 0.0);
    for (double v : grad.outputs()[1 - block].bias.Values()) ASSERT_EQ(v, 0.0);
    BlockSoftmaxNet before = net;
    TrainStep(&net, batch, 0.1);
    EXPECT_EQ(net.outputs()[1 - block].weight, before.outputs()[1 - block].weight);
    EXPECT_EQ(net.outputs()[1 - block].bias, before.outputs()[1 - block].bias);
    EXPECT_NE(net.hidden()[0].weight, before.hidden()[0].weight);
  }
}

TEST(Training, TargetOutOfRangeIsError) {
  BlockSoftmaxNet net(SmallSpec(1));
  Rng rng(1);
  TrainBatch batch = RandomBatch(net, 1, &rng);
  batch.chunks[1].targets[0] = 2;
  EXPECT_THROW(ComputeLoss(net, batch), ValidationError);
  batch.chunks.clear();
  EXPECT_THROW(ComputeLoss(net, batch), ValidationError);
}

TEST(Training, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 20; seed++) {
    BlockSoftmaxNet net(SmallSpec(seed));
    Rng rng(seed + 1000);
    for (Matrix *p : net.Params())
      for (double &v : p->Values()) v = 0.7 * rng.Gauss();
    ASSERT_LE(net.NumParams(), 500u);
    TrainBatch batch = RandomBatch(net, static_cast<int>(seed % 2), &rng);
    BlockSoftmaxNet grad;
    ComputeLossAndGradient(net, batch, &grad);
    double err = oracle::MaxGradientRelError(net, grad, batch, 1e-5);
    EXPECT_LT(err, 1e-4) << "seed " << seed;
  }
}

TEST(Training, SamplerShares) {
  LanguageSampler prop({900.0, 100.0}, SamplingPolicy::kProportional, 3);
  LanguageSampler uni({900.0, 100.0}, SamplingPolicy::kUniform, 3);
  int n = 2000, a = 0, u = 0;
  for (int i = 0; i < n; i++) {
    a += prop.Next() == 0;
    u += uni.Next() == 0;
  }
  EXPECT_NEAR(a / static_cast<double>(n), 0.9, 0.05);
  EXPECT_NEAR(u / static_cast<double>(n), 0.5, 0.05);
  EXPECT_THROW(LanguageSampler({0.0, 0.0}, SamplingPolicy::kUniform, 1), DataError);
}

struct SeparableData {
  std::vector<SynthUtterance> corpus;
  std::vector<TrainUtterance> train;
  NetSpec spec;
};

SeparableData MakeSeparable() {
  SeparableData d;
  SynthConfig cfg = ReferenceSeparableConfig(7);
  d.corpus = SynthCorpus(cfg);
  LanguageInventory inv = cfg.Inventory();
  for (const auto &u : d.corpus) {
    std::vector<int> targets(u.gold.frame_state.begin(), u.gold.frame_state.end());
    d.train.push_back({&u.emissions, targets, inv.At(u.gold.lang).code});
  }
  d.spec.feat_dim = cfg.emission_dim;
  d.spec.hidden_dim = 64;
  d.spec.num_hidden = 3;
  d.spec.contexts = NetSpec::DefaultContexts(3);
  d.spec.bottleneck_dim = 8;
  for (const auto &l : cfg.languages)
    d.spec.blocks.push_back({l.phoneset.lang().code, l.phoneset.BlockSize()});
  d.spec.seed = 7;
  return d;
}

TEST(Training, EpochsZeroLeavesNetUnchanged) {
  SeparableData d = MakeSeparable();
  BlockSoftmaxNet net(d.spec), before = net;
  TrainSchedule sched;
  sched.epochs = 0;
  TrainReport r = Train(&net, d.train, sched);
  EXPECT_TRUE(net == before);
  EXPECT_TRUE(r.epoch_loss.empty());
}

TEST(Training, UnknownLanguageAndMissingBlockData) {
  SeparableData d = MakeSeparable();
  BlockSoftmaxNet net(d.spec);
  TrainSchedule sched;
  auto data = d.train;
  data[0].lang = "xho";
  EXPECT_THROW(Train(&net, data, sched), ConfigError);
  data = d.train;
  std::erase_if(data, [&](const TrainUtterance &u) { return u.lang == d.spec.blocks[1].lang; });
  EXPECT_THROW(Train(&net, data, sched), DataError);
}

TEST(Training, SeparableCorpusLossAndDeterminism) {
  SeparableData d = MakeSeparable();
  BlockSoftmaxNet net(d.spec);
  FitInputNormalization(&net, d.train);
  BlockSoftmaxNet copy = net;
  TrainSchedule sched;
  sched.epochs = 20;
  sched.seed = 7;
  TrainReport r = Train(&net, d.train, sched);
  ASSERT_EQ(r.epoch_loss.size(), 20u);
  for (std::size_t b = 0; b < d.spec.blocks.size(); b++) {
    double limit = 0.5 * std::log(static_cast<double>(d.spec.blocks[b].size));
    EXPECT_LT(r.epoch_loss.back()[b], limit) << d.spec.blocks[b].lang;
    EXPECT_LT(r.epoch_loss.back()[b], r.epoch_loss.front()[b]);
  }
  sched.epochs = 3;
  BlockSoftmaxNet a = copy, b = copy;
  Train(&a, d.train, sched);
  Train(&b, d.train, sched);
  EXPECT_TRUE(a == b);
}

TEST(Features, ShiftEquivariance) {
  NetSpec s = SmallSpec(21);
  s.contexts = NetSpec::DefaultContexts(2);
  BlockSoftmaxNet net(s);
  Rng rng(22);
  const int k = 5, frames = 30;
  FeatureMatrix a{"u", FeatureKind::kMfcc40, RandomMatrix(frames, 2, &rng), 10};
  FeatureMatrix b{"u", FeatureKind::kMfcc40, RandomMatrix(k, 2, &rng), 10};
  for (int t = 0; t < frames; t++) b.data.AppendRow(a.data.Row(t));
  FeatureMatrix ea = ExtractBnf(net, a), eb = ExtractBnf(net, b);
  ASSERT_EQ(ea.NumFrames(), static_cast<std::size_t>(frames));
  ASSERT_EQ(eb.NumFrames(), static_cast<std::size_t>(frames + k));
  EXPECT_EQ(ea.kind, FeatureKind::kBnf);
  const int left = s.LeftContext(), right = s.RightContext();
  for (int t = left; t < frames - right; t++)
    for (int j = 0; j < s.bottleneck_dim; j++)
      ASSERT_NEAR(ea.data(t, j), eb.data(t + k, j), 1e-12) << t;
}

TEST(Features, BnfDimensions) {
  for (int dim : {39, 80}) {
    NetSpec s = SmallSpec(1);
    s.bottleneck_dim = dim;
    BlockSoftmaxNet net(s);
    Rng rng(1);
    FeatureMatrix f{"u", FeatureKind::kMfcc40, RandomMatrix(12, 2, &rng), 10};
    EXPECT_EQ(ExtractBnf(net, f).Dim(), static_cast<std::size_t>(dim));
    f.data = RandomMatrix(12, 3, &rng);
    EXPECT_THROW(ExtractBnf(net, f), DimensionError);
  }
}

TEST(Features, CombineOrderAndDims) {
  Rng rng(3);
  FeatureMatrix mfcc{"u", FeatureKind::kMfcc40, RandomMatrix(5, 40, &rng), 10};
  FeatureMatrix pitch{"u", FeatureKind::kPitch3, RandomMatrix(5, 3, &rng), 10};
  FeatureMatrix bnf{"u", FeatureKind::kBnf, RandomMatrix(5, 39, &rng), 10};
  std::vector<double> ivec(100);
  for (double &v : ivec) v = rng.Gauss();
  FeatureMatrix c = CombineFeatures({&bnf, &mfcc, &pitch}, ivec);
  ASSERT_EQ(c.Dim(), 182u);
  EXPECT_EQ(c.kind, FeatureKind::kCombined);
  for (std::size_t t = 0; t < 5; t++) {
    for (int j = 0; j < 40; j++) ASSERT_EQ(c.data(t, j), mfcc.data(t, j));
    for (int j = 0; j < 3; j++) ASSERT_EQ(c.data(t, 40 + j), pitch.data(t, j));
    for (int j = 0; j < 100; j++) ASSERT_EQ(c.data(t, 43 + j), ivec[j]);
    for (int j = 0; j < 39; j++) ASSERT_EQ(c.data(t, 143 + j), bnf.data(t, j));
  }
}

TEST(Features, CombineEdgeCases) {
  std::vector<double> ivec{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  FeatureMatrix c = CombineFeatures({}, ivec, 4);
  ASSERT_EQ(c.Dim(), 10u);
  ASSERT_EQ(c.NumFrames(), 4u);
  for (std::size_t t = 0; t < 4; t++)
    for (int j = 0; j < 10; j++) EXPECT_EQ(c.data(t, j), j + 1);
  EXPECT_THROW(CombineFeatures({}, ivec), ValidationError);
  Rng rng(4);
  FeatureMatrix a{"u", FeatureKind::kMfcc40, RandomMatrix(98, 40, &rng), 10};
  FeatureMatrix b{"u", FeatureKind::kPitch3, RandomMatrix(97, 3, &rng), 10};
  try {
    CombineFeatures({&a, &b}, ivec);
    FAIL() << "no error";
  } catch (const DimensionError &e) {
    std::string msg = e.what();
    EXPECT_NE(msg.find("mfcc40"), std::string::npos) << msg;
    EXPECT_NE(msg.find("pitch3"), std::string::npos) << msg;
  }
}

std::vector<TrainUtterance> OneHotSet(std::vector<Matrix> *mats, int k, int n, Rng *rng) {
  std::vector<TrainUtterance> out;
  mats->reserve(2);
  for (const char *lang : {"aa", "bb"}) {
    Matrix m(n, k);
    std::vector<int> targets(n);
    for (int t = 0; t < n; t++) {
      targets[t] = rng->UniformInt(0, k - 1);
      m(t, targets[t]) = 1.0;
    }
    mats->push_back(std::move(m));
    out.push_back({&mats->back(), targets, lang});
  }
  return out;
}

TEST(Probe, OneHotFeaturesAreLearnedExactly) {
  Rng rng(5);
  std::vector<Matrix> train_m, test_m;
  auto train = OneHotSet(&train_m, 4, 200, &rng);
  auto test = OneHotSet(&test_m, 4, 100, &rng);
  ProbeReport r = ProbeEval({{"aa", 4}, {"bb", 4}}, train, test, ProbeOptions{});
  EXPECT_EQ(r.accuracy[0], 1.0);
  EXPECT_EQ(r.accuracy[1], 1.0);
  EXPECT_EQ(r.overall, 1.0);
}

TEST(Probe, RandomLabelsAtChance) {
  Rng rng(6);
  const int k = 4;
  Matrix ftr = RandomMatrix(3000, 5, &rng), fte = RandomMatrix(3000, 5, &rng);
  std::vector<int> ttr(3000), tte(3000);
  for (int &t : ttr) t = rng.UniformInt(0, k - 1);
  for (int &t : tte) t = rng.UniformInt(0, k - 1);
  ProbeOptions opts;
  opts.seed = 6;
  ProbeReport r =
      ProbeEval({{"aa", k}}, {{&ftr, ttr, "aa"}}, {{&fte, tte, "aa"}}, opts);
  EXPECT_NEAR(r.accuracy[0], 1.0 / k, 0.05);
}

TEST(Probe, EmptyTestSetAndDeterminism) {
  Rng rng(7);
  std::vector<Matrix> m;
  auto train = OneHotSet(&m, 3, 50, &rng);
  std::vector<TrainUtterance> empty;
  EXPECT_THROW(ProbeEval({{"aa", 3}, {"bb", 3}}, train, empty, ProbeOptions{}), DataError);
  ProbeClassifier a({{"aa", 3}, {"bb", 3}}, 3), b({{"aa", 3}, {"bb", 3}}, 3);
  a.Train(train, ProbeOptions{});
  b.Train(train, ProbeOptions{});
  EXPECT_EQ(a.Posteriors(m[0], 0), b.Posteriors(m[0], 0));
}

}  // namespace
}  // namespace mbnf
