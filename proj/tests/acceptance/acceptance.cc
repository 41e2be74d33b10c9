// tests/acceptance/acceptance.cc

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

// Acceptance gate: one PASS/FAIL line per criterion AC-1 .. AC-8.
// Exit status is 0 only when every criterion passes within its time limit.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "json.hpp"
#include "mbnf/align/mono-hmm.h"
#include "mbnf/align/viterbi.h"
#include "mbnf/base/rng.h"
#include "mbnf/corpus/synth.h"
#include "mbnf/dsp/mfcc.h"
#include "mbnf/gmm/gmm-em.h"
#include "mbnf/gmm/ivector.h"
#include "mbnf/io/archive.h"
#include "mbnf/metrics/scoring.h"
#include "mbnf/nnet/block-softmax-net.h"
#include "mbnf/nnet/nnet-train.h"
#include "mbnf/pipeline/pipeline.h"
#include "oracle/edit-oracle.h"
#include "oracle/mfcc-oracle.h"
#include "oracle/nnet-oracle.h"
#include "oracle/viterbi-oracle.h"

namespace mbnf {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Matrix RandomMatrix(std::size_t rows, std::size_t cols, Rng *rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (double &v : m.Values()) v = scale * rng->Gauss();
  return m;
}

NetSpec RandomSmallSpec(std::uint64_t seed, Rng *rng) {
  NetSpec s;
  s.feat_dim = rng->UniformInt(1, 3);
  s.hidden_dim = rng->UniformInt(2, 5);
  s.num_hidden = rng->UniformInt(1, 2);
  s.contexts = {{-1, 0, 1}};
  if (s.num_hidden == 2) s.contexts.push_back({-1, 0, 1});
  s.bottleneck_dim = rng->UniformInt(1, 3);
  int blocks = rng->UniformInt(2, 3);
  for (int b = 0; b < blocks; b++) s.blocks.push_back({fmt::format("l{}", b), rng->UniformInt(1, 5)});
  s.seed = seed;
  return s;
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
  return batch;
}

Outcome Ac1() {
  double worst = 0.0;
  std::size_t nonzero = 0;
  for (std::uint64_t seed = 0; seed < 1000; seed++) {
    Rng rng(seed);
    BlockSoftmaxNet net(RandomSmallSpec(seed, &rng));
    for (Matrix *p : net.Params())
      for (double &v : p->Values()) v = 2.0 * rng.Gauss();
    Matrix in = RandomMatrix(6, net.spec().InputDim(), &rng, 3.0);
    std::vector<Matrix> post;
    net.Forward(in, -1, nullptr, &post);
    for (const Matrix &p : post)
      for (std::size_t r = 0; r < p.NumRows(); r++) {
        double sum = 0.0;
        for (double v : p.Row(r)) sum += v;
        worst = std::max(worst, std::abs(sum - 1.0));
      }
    const int owner = rng.UniformInt(0, static_cast<int>(net.spec().blocks.size()) - 1);
    BlockSoftmaxNet grad;
    ComputeLossAndGradient(net, RandomBatch(net, owner, &rng), &grad);
    for (std::size_t b = 0; b < grad.outputs().size(); b++) {
      if (static_cast<int>(b) == owner) continue;
      for (double v : grad.outputs()[b].weight.Values()) nonzero += v != 0.0;
      for (double v : grad.outputs()[b].bias.Values()) nonzero += v != 0.0;
    }
  }
  return {worst <= 1e-6 && nonzero == 0,
          fmt::format("1000 nets: max |block sum - 1| = {:.1e} (limit 1e-6), "
                      "nonzero non-owning gradient entries = {}",
                      worst, nonzero)};
}

Outcome Ac2() {
  double worst = 0.0;
  std::size_t max_params = 0;
  for (std::uint64_t seed = 0; seed < 20; seed++) {
    NetSpec s;
    s.feat_dim = 2;
    s.hidden_dim = 4;
    s.num_hidden = 2;
    s.contexts = {{-1, 0, 1}, {-1, 0, 1}};
    s.bottleneck_dim = 3;
    s.blocks = {{"aa", 3}, {"bb", 2}};
    s.seed = seed;
    BlockSoftmaxNet net(s);
    Rng rng(seed + 1000);
    for (Matrix *p : net.Params())
      for (double &v : p->Values()) v = 0.7 * rng.Gauss();
    max_params = std::max(max_params, net.NumParams());
    TrainBatch batch = RandomBatch(net, static_cast<int>(seed % 2), &rng);
    batch.chunks[0].targets[0] = -1;
    BlockSoftmaxNet grad;
    ComputeLossAndGradient(net, batch, &grad);
    worst = std::max(worst, oracle::MaxGradientRelError(net, grad, batch, 1e-5));
  }
  return {worst < 1e-4 && max_params <= 500,
          fmt::format("20 seeds, {} params: max relative error {:.2e} (limit 1e-4)", max_params,
                      worst)};
}

Outcome Ac3() {
  Rng rng(3);
  std::size_t bad = 0, frames_checked = 0, count_errors = 0;
  for (int c = 0; c < 100; c++) {
    MfccConfig cfg = c % 2 ? MfccConfig::Mfcc40() : MfccConfig::Mfcc13();
    oracle::MfccParams p;
    p.num_filters = cfg.num_mel_filters;
    p.num_ceps = cfg.num_ceps;
    p.lifter = cfg.lifter;
    AudioSegment a;
    const std::size_t n = rng.UniformInt(400, 2400);
    for (std::size_t i = 0; i < n; i++) a.samples.push_back(rng.Uniform(-1.0, 1.0));
    FeatureMatrix got = Mfcc(a, cfg);
    auto want = oracle::Mfcc(p, a.samples);
    count_errors += got.NumFrames() != 1 + (n - 400) / 160 || want.size() != got.NumFrames();
    for (std::size_t t = 0; t < std::min(want.size(), got.NumFrames()); t++, frames_checked++)
      for (std::size_t k = 0; k < want[t].size(); k++)
        bad += !oracle::CloseRel(got.data(t, k), want[t][k], 1e-6);
  }
  AudioSegment second;
  second.samples.assign(16000, 0.0);
  second.samples[100] = 0.5;
  const std::size_t one_second = Mfcc(second, MfccConfig::Mfcc40()).NumFrames();
  return {bad == 0 && count_errors == 0 && one_second == 98,
          fmt::format("100 signals, {} frames: {} coefficients outside 1e-6, {} frame-count "
                      "mismatches; 1 s -> {} frames",
                      frames_checked, bad, count_errors, one_second)};
}

Matrix Cloud(Rng *rng, std::size_t n, std::vector<double> mean, double sd) {
  Matrix m(n, mean.size());
  for (std::size_t t = 0; t < n; t++)
    for (std::size_t d = 0; d < mean.size(); d++) m(t, d) = mean[d] + sd * rng->Gauss();
  return m;
}

Outcome Ac4() {
  double gmm_worst = HUGE_VAL, tm_worst = HUGE_VAL, vit_worst = HUGE_VAL;
  for (std::uint64_t seed = 0; seed < 10; seed++) {
    Rng rng(seed);
    Matrix a = Cloud(&rng, 300, {0, 0, 0}, 1.0), b = Cloud(&rng, 200, {2, -1, 3}, 0.7);
    GmmEmOptions opts;
    opts.num_comp = 4;
    opts.iters = 15;
    opts.seed = seed;
    GmmEmResult r = EmFitGmm({&a, &b}, opts);
    for (std::size_t i = 1; i < r.loglik.size(); i++)
      gmm_worst = std::min(gmm_worst, r.loglik[i] - r.loglik[i - 1]);

    DiagGmm ubm = r.gmm;
    std::vector<BwStats> stats;
    for (int u = 0; u < 12; u++)
      stats.push_back(AccumulateBwStats(ubm, Cloud(&rng, 25, {rng.Gauss(), rng.Gauss(), rng.Gauss()}, 1.0)));
    TMatrixOptions topts;
    topts.ivec_dim = 3;
    topts.iters = 10;
    topts.seed = seed;
    TMatrixResult t = TrainTMatrix(ubm, stats, topts);
    for (std::size_t i = 1; i < t.objective.size(); i++)
      tm_worst = std::min(tm_worst, t.objective[i] - t.objective[i - 1]);

    SynthConfig cfg = ReferenceSeparableConfig(seed + 1);
    std::vector<SynthUtterance> utts = SynthCorpus(cfg);
    std::vector<AlignInput> in;
    for (const auto &u : utts)
      if (u.gold.lang == 0) in.push_back({&u.record, &u.emissions});
    MonoHmmOptions mopts;
    mopts.seed = seed;
    MonophoneResult m = TrainMonophone(in, cfg.languages[0].phoneset, 5, mopts);
    for (std::size_t i = 1; i < m.loglik.size(); i++)
      vit_worst = std::min(vit_worst, m.loglik[i] - m.loglik[i - 1]);
  }
  return {gmm_worst >= -1e-8 && tm_worst >= -1e-6 && vit_worst >= -1e-6,
          fmt::format("10 runs each, worst step: GMM {:.1e} (>= -1e-8), T-matrix {:.1e} "
                      "(>= -1e-6), Viterbi-EM {:.1e} (>= -1e-6)",
                      gmm_worst, tm_worst, vit_worst)};
}

Outcome Ac5() {
  Rng rng(5);
  std::size_t cases = 0, mismatches = 0;
  for (int states = 1; states <= 3; states++)
    for (int frames = states; frames <= 6; frames++)
      for (int trial = 0; trial < 200; trial++, cases++) {
        Matrix emit(frames, states);
        for (double &v : emit.Values()) v = rng.Uniform(-5, 0);
        std::vector<double> self(states), next(states);
        for (int s = 0; s < states; s++) {
          double p = rng.Uniform(0.05, 0.95);
          self[s] = std::log(p);
          next[s] = std::log(1 - p);
        }
        std::vector<int> want;
        double best = oracle::BruteForceBest(emit, self, next, &want);
        ViterbiResult got = ViterbiDecode(emit, self, next);
        mismatches += got.path != want || std::abs(got.loglik - best) > 1e-9;
      }

  SynthConfig cfg = ReferenceSeparableConfig(7);
  std::vector<SynthUtterance> utts = SynthCorpus(cfg);
  std::size_t right = 0, total = 0;
  for (int l = 0; l < static_cast<int>(cfg.languages.size()); l++) {
    std::vector<AlignInput> in;
    for (const auto &u : utts)
      if (u.gold.lang == l) in.push_back({&u.record, &u.emissions});
    MonoHmmOptions opts;
    opts.seed = 7;
    MonophoneResult r = TrainMonophone(in, cfg.languages[l].phoneset, 5, opts);
    for (const auto &u : utts) {
      if (u.gold.lang != l) continue;
      AlignResult a = ViterbiAlign(r.hmms, u.emissions, u.record);
      for (std::size_t t = 0; t < a.alignment.NumFrames(); t++)
        right += a.alignment.frame_state[t] == u.gold.frame_state[t];
      total += u.gold.NumFrames();
    }
  }
  const double acc = static_cast<double>(right) / static_cast<double>(total);
  return {mismatches == 0 && acc >= 0.9,
          fmt::format("{} exhaustive instances, {} mismatches; separable corpus frame-state "
                      "accuracy {:.4f} (>= 0.90)",
                      cases, mismatches, acc)};
}

Outcome Ac6() {
  auto seqs = oracle::AllBinarySequences(4);
  std::size_t pairs = 0, bad = 0;
  for (const auto &r : seqs)
    for (const auto &h : seqs) {
      pairs++;
      bad += static_cast<int>(AlignTokens(r, h).counts.Errors()) != oracle::BruteEditDistance(r, h);
    }
  std::vector<Token> ref{{"a", "E"}, {"b", "Z"}, {"c", "Z"}, {"d", "E"}};
  const std::vector<std::string> words{"a", "b", "c", "d"}, hyp{"a", "b", "c", "x"};
  SwitchStats s = CsBigramCorrect(ref, AlignTokens(words, hyp));
  const bool example = s.switch_points == 2 && s.Percent() && *s.Percent() == 50.0;
  return {bad == 0 && example,
          fmt::format("{} pairs, {} edit-distance mismatches; worked example {} switch points, "
                      "{:.1f}% (want 2, 50.0%)",
                      pairs, bad, s.switch_points, s.Percent().value_or(-1.0))};
}

struct ScratchDir {
  fs::path path;
  explicit ScratchDir(const std::string &tag)
      : path(fs::temp_directory_path() / fmt::format("mbnf-acceptance-{}-{}", getpid(), tag)) {
    fs::remove_all(path);
  }
  ~ScratchDir() { fs::remove_all(path); }
};

nlohmann::ordered_json RunDesk(std::uint64_t seed, const fs::path &dir) {
  PipelineConfig c = PipelineConfig::Preset("desk");
  c.seed = seed;
  Pipeline p(c, dir.string());
  return p.RunAll(false);
}

Outcome Ac7() {
  std::ifstream in(MBNF_FIXTURES "/ac7-reference.json");
  if (!in) return {false, "missing fixture ac7-reference.json"};
  nlohmann::json fix = nlohmann::json::parse(in);
  const auto seeds = fix["seeds"].get<std::vector<std::uint64_t>>();
  const auto min_ok = fix["min_nonnegative_seeds"].get<std::size_t>();
  const auto ref_base = fix["first_run"][kBaselineSet].get<std::vector<double>>();
  const auto ref_comb = fix["first_run"][kCombinedSet].get<std::vector<double>>();
  ScratchDir scratch("ac7");
  double sum_base = 0.0, sum_comb = 0.0, drift = 0.0;
  std::size_t nonneg = 0;
  std::string per_seed;
  for (std::size_t i = 0; i < seeds.size(); i++) {
    auto s = RunDesk(seeds[i], scratch.path / std::to_string(seeds[i]));
    const double base = s["ac7"][kBaselineSet], comb = s["ac7"][kCombinedSet];
    sum_base += base;
    sum_comb += comb;
    nonneg += comb - base >= 0.0;
    per_seed += fmt::format("{}{:+.4f}", i ? " " : "", comb - base);
    if (i < ref_base.size() && i < ref_comb.size())
      drift = std::max({drift, std::abs(base - ref_base[i]), std::abs(comb - ref_comb[i])});
  }
  const double n = static_cast<double>(seeds.size());
  return {sum_comb >= sum_base && nonneg >= min_ok,
          fmt::format("mean held-out accuracy mfcc-only {:.4f}, combined {:.4f}; per-seed delta "
                      "[{}]; {}/{} non-negative (>= {}); max drift from first run {:.1e}",
                      sum_base / n, sum_comb / n, per_seed, nonneg, seeds.size(), min_ok, drift)};
}

Outcome Ac8() {
  ScratchDir scratch("ac8");
  RunDesk(7, scratch.path / "a");
  RunDesk(7, scratch.path / "b");
  std::size_t archives = 0;
  std::vector<std::string> differ;
  for (const auto &e : fs::directory_iterator(scratch.path / "a")) {
    if (e.path().extension() != ".mbna") continue;
    archives++;
    const fs::path other = scratch.path / "b" / e.path().filename();
    if (!fs::exists(other) || FileChecksum(e.path().string()) != FileChecksum(other.string()))
      differ.push_back(e.path().filename().string());
  }
  std::string list;
  for (const auto &d : differ) list += " " + d;
  return {archives > 0 && differ.empty(),
          fmt::format("two desk runs (seed 7): {} archives, {} differ{}", archives, differ.size(),
                      list)};
}

}  // namespace
}  // namespace mbnf

int main() {
  struct Criterion {
    const char *id;
    double limit_seconds;
    std::function<mbnf::Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC-1", 10, mbnf::Ac1},  {"AC-2", 30, mbnf::Ac2},  {"AC-3", 30, mbnf::Ac3},
      {"AC-4", 60, mbnf::Ac4},  {"AC-5", 60, mbnf::Ac5},  {"AC-6", 30, mbnf::Ac6},
      {"AC-7", 600, mbnf::Ac7}, {"AC-8", 600, mbnf::Ac8},
  };
  int failed = 0;
  for (const auto &c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    mbnf::Outcome o;
    try {
      o = c.run();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool pass = o.pass && secs < c.limit_seconds;
    failed += !pass;
    std::cout << fmt::format("{} {} {} [{:.2f} s, limit {:.0f} s]", c.id, pass ? "PASS" : "FAIL",
                             o.detail, secs, c.limit_seconds)
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
