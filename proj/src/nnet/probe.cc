// src/nnet/probe.cc

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

#include "mbnf/nnet/probe.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {

ProbeClassifier::ProbeClassifier(std::vector<OutputBlock> blocks, int dim)
    : blocks_(std::move(blocks)), dim_(dim), shift_(dim, 0.0), scale_(dim, 1.0) {
  if (dim < 1) throw ConfigError("probe: feature dim must be >= 1");
  if (blocks_.empty()) throw ConfigError("probe: no output blocks");
  for (const auto &b : blocks_) {
    if (b.size < 1) throw ConfigError("probe: block '" + b.lang + "' is empty");
    out_.push_back({Matrix(b.size, dim), Matrix(1, b.size)});
  }
}

int ProbeClassifier::BlockIndex(const std::string &lang) const {
  for (std::size_t b = 0; b < blocks_.size(); b++)
    if (blocks_[b].lang == lang) return static_cast<int>(b);
  return -1;
}

void ProbeClassifier::Standardize(std::span<const double> in, std::span<double> out) const {
  for (int j = 0; j < dim_; j++) out[j] = (in[j] - shift_[j]) * scale_[j];
}

Matrix ProbeClassifier::Posteriors(const Matrix &feats, int block) const {
  if (block < 0 || static_cast<std::size_t>(block) >= blocks_.size())
    throw ValidationError("probe: block index out of range");
  if (feats.NumCols() != static_cast<std::size_t>(dim_))
    throw DimensionError("probe: feature dim " + std::to_string(feats.NumCols()) +
                         " != " + std::to_string(dim_));
  Matrix x(feats.NumRows(), dim_), y;
  for (std::size_t t = 0; t < feats.NumRows(); t++) Standardize(feats.Row(t), x.Row(t));
  kernels::GemmNT(x, out_[block].weight, &y);
  for (std::size_t t = 0; t < y.NumRows(); t++)
    kernels::Axpy(1.0, out_[block].bias.Row(0), y.Row(t));
  SoftmaxRows(&y);
  return y;
}

std::vector<int> ProbeClassifier::Predict(const Matrix &feats, int block) const {
  Matrix p = Posteriors(feats, block);
  std::vector<int> out(p.NumRows());
  for (std::size_t t = 0; t < p.NumRows(); t++) {
    auto row = p.Row(t);
    out[t] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

void ProbeClassifier::Train(const std::vector<TrainUtterance> &data, const ProbeOptions &opts) {
  if (opts.epochs < 0) throw ConfigError("probe: epochs must be >= 0");
  if (!(opts.learning_rate > 0.0)) throw ConfigError("probe: learning rate must be > 0");
  if (opts.minibatch_frames < 1) throw ConfigError("probe: minibatch must be >= 1");
  struct FrameRef {
    std::size_t utt, t;
  };
  const std::size_t nb = blocks_.size();
  std::vector<std::vector<FrameRef>> frames(nb);
  std::vector<double> mean(dim_, 0.0), var(dim_, 0.0);
  double n = 0.0;
  for (std::size_t u = 0; u < data.size(); u++) {
    const TrainUtterance &utt = data[u];
    int b = BlockIndex(utt.lang);
    if (b < 0) throw ConfigError("probe: language '" + utt.lang + "' has no block");
    if (utt.feats->NumCols() != static_cast<std::size_t>(dim_) ||
        utt.targets.size() != utt.feats->NumRows())
      throw DimensionError("probe: inconsistent training utterance " + std::to_string(u));
    for (std::size_t t = 0; t < utt.targets.size(); t++) {
      if (utt.targets[t] >= blocks_[b].size)
        throw ValidationError("probe: target out of range for '" + utt.lang + "'");
      if (utt.targets[t] < 0) continue;
      frames[b].push_back({u, t});
      kernels::Axpy(1.0, utt.feats->Row(t), mean);
      n += 1.0;
    }
  }
  if (n == 0.0) throw DataError("probe: no labeled training frames");
  for (double &m : mean) m /= n;
  for (const auto &fr : frames)
    for (const auto &f : fr)
      for (int j = 0; j < dim_; j++) {
        double v = (*data[f.utt].feats)(f.t, j) - mean[j];
        var[j] += v * v;
      }
  shift_ = mean;
  for (int j = 0; j < dim_; j++) {
    double sd = std::sqrt(var[j] / n);
    scale_[j] = sd > 1e-10 ? 1.0 / sd : 1.0;
  }

  std::vector<double> counts(nb);
  for (std::size_t b = 0; b < nb; b++) counts[b] = static_cast<double>(frames[b].size());
  const std::size_t mb = static_cast<std::size_t>(opts.minibatch_frames);
  std::vector<double> x(dim_), p;
  for (int epoch = 0; epoch < opts.epochs; epoch++) {
    const double lr = opts.learning_rate * std::pow(opts.lr_decay, epoch);
    std::size_t steps = 0;
    for (std::size_t b = 0; b < nb; b++) {
      Rng rng(SubSeed(opts.seed, epoch, b));
      std::shuffle(frames[b].begin(), frames[b].end(), rng.engine());
      steps += (frames[b].size() + mb - 1) / mb;
    }
    LanguageSampler sampler(counts, SamplingPolicy::kProportional,
                            SubSeed(opts.seed, epoch, 0x9b0e));
    std::vector<std::size_t> cursor(nb, 0);
    for (std::size_t s = 0; s < steps; s++) {
      const int b = sampler.Next();
      const auto &fr = frames[b];
      const std::size_t k = static_cast<std::size_t>(blocks_[b].size);
      Matrix gw(k, dim_), gb(1, k);
      std::size_t used = 0;
      for (; used < mb; used++) {
        if (used > 0 && cursor[b] % fr.size() == 0) break;
        const FrameRef &f = fr[cursor[b]++ % fr.size()];
        Standardize(data[f.utt].feats->Row(f.t), x);
        p.assign(out_[b].bias.Values().begin(), out_[b].bias.Values().end());
        for (std::size_t c = 0; c < k; c++) p[c] += kernels::Dot(out_[b].weight.Row(c), x);
        double mx = *std::max_element(p.begin(), p.end()), z = 0.0;
        for (double &v : p) z += (v = std::exp(v - mx));
        for (double &v : p) v /= z;
        p[data[f.utt].targets[f.t]] -= 1.0;
        for (std::size_t c = 0; c < k; c++) {
          kernels::Axpy(p[c], x, gw.Row(c));
          gb(0, c) += p[c];
        }
      }
      const double step = lr / static_cast<double>(used);
      kernels::Axpy(-step, gw.Values(), out_[b].weight.Values());
      kernels::Axpy(-step, gb.Values(), out_[b].bias.Values());
    }
  }
}

ProbeReport EvaluateProbe(const ProbeClassifier &probe, const std::vector<TrainUtterance> &test) {
  const std::size_t nb = probe.blocks().size();
  ProbeReport r;
  r.frames.assign(nb, 0);
  std::vector<std::size_t> correct(nb, 0);
  for (const auto &utt : test) {
    int b = probe.BlockIndex(utt.lang);
    if (b < 0) throw ConfigError("probe: language '" + utt.lang + "' has no block");
    if (utt.targets.size() != utt.feats->NumRows())
      throw DimensionError("probe: targets do not match frames");
    std::vector<int> hyp = probe.Predict(*utt.feats, b);
    for (std::size_t t = 0; t < hyp.size(); t++) {
      if (utt.targets[t] < 0) continue;
      r.frames[b]++;
      correct[b] += hyp[t] == utt.targets[t];
    }
  }
  std::size_t total = 0, total_correct = 0;
  for (std::size_t b = 0; b < nb; b++) {
    r.langs.push_back(probe.blocks()[b].lang);
    r.accuracy.push_back(r.frames[b] ? static_cast<double>(correct[b]) / r.frames[b]
                                     : std::numeric_limits<double>::quiet_NaN());
    total += r.frames[b];
    total_correct += correct[b];
  }
  if (total == 0) throw DataError("probe: empty test set");
  r.overall = static_cast<double>(total_correct) / total;
  return r;
}

ProbeReport ProbeEval(const std::vector<OutputBlock> &blocks,
                      const std::vector<TrainUtterance> &train,
                      const std::vector<TrainUtterance> &test, const ProbeOptions &opts) {
  std::size_t labeled = 0;
  for (const auto &u : test)
    for (int t : u.targets) labeled += t >= 0;
  if (labeled == 0) throw DataError("probe: empty test set");
  if (train.empty()) throw DataError("probe: empty training set");
  ProbeClassifier probe(blocks, static_cast<int>(train[0].feats->NumCols()));
  probe.Train(train, opts);
  return EvaluateProbe(probe, test);
}

}  // namespace mbnf
