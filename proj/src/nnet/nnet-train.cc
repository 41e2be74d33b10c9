// src/nnet/nnet-train.cc

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

#include "mbnf/nnet/nnet-train.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <fmt/ranges.h>

#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"
#include "mbnf/kernels/kernels.h"
#include "tdnn-ops.h"

namespace mbnf {
namespace {

void AddColumnSums(const Matrix &m, Matrix *bias) {
  for (std::size_t r = 0; r < m.NumRows(); r++) kernels::Axpy(1.0, m.Row(r), bias->Row(0));
}

std::size_t CheckBatch(const BlockSoftmaxNet &net, const TrainBatch &batch) {
  const auto &blocks = net.spec().blocks;
  if (batch.block < 0 || static_cast<std::size_t>(batch.block) >= blocks.size())
    throw ValidationError("batch block " + std::to_string(batch.block) + " out of range");
  const int size = blocks[batch.block].size;
  std::size_t valid = 0;
  for (const auto &c : batch.chunks)
    for (int t : c.targets) {
      if (t >= size)
        throw ValidationError("target " + std::to_string(t) + " >= block size " +
                              std::to_string(size) + " of '" + blocks[batch.block].lang +
                              "'");
      valid += t >= 0;
    }
  if (valid == 0) throw ValidationError("minibatch has no labeled frames");
  return valid;
}

double Run(const BlockSoftmaxNet &net, const TrainBatch &batch, BlockSoftmaxNet *grad) {
  const std::size_t valid = CheckBatch(net, batch);
  const NetSpec &spec = net.spec();
  const int b = batch.block;
  if (grad) {
    *grad = net;
    grad->SetZero();
  }
  double loss = 0.0;
  internal::ForwardCache c;
  for (const auto &chunk : batch.chunks) {
    internal::ForwardWithCache(net, chunk.input, &c);
    Matrix p;
    internal::AffineForward(net.outputs()[b], c.bottleneck, &p);
    SoftmaxRows(&p);
    if (p.NumRows() != chunk.targets.size())
      throw DimensionError("chunk yields " + std::to_string(p.NumRows()) +
                           " frames for " + std::to_string(chunk.targets.size()) +
                           " targets");
    for (std::size_t r = 0; r < p.NumRows(); r++) {
      int t = chunk.targets[r];
      if (t < 0) {
        for (double &v : p.Row(r)) v = 0.0;
        continue;
      }
      loss -= std::log(std::max(p(r, t), std::numeric_limits<double>::min()));
      p(r, t) -= 1.0;
    }
    if (!grad) continue;
    // p now holds N * d(loss)/d(logits).
    for (double &v : p.Values()) v /= static_cast<double>(valid);
    AffineParams &go = grad->outputs()[b];
    kernels::GemmTNAdd(p, c.bottleneck, &go.weight);
    AddColumnSums(p, &go.bias);
    Matrix d_e, d_h;
    kernels::GemmNN(p, net.outputs()[b].weight, &d_e);
    const int layers = spec.num_hidden;
    kernels::GemmTNAdd(d_e, c.act[layers - 1], &grad->bottleneck().weight);
    AddColumnSums(d_e, &grad->bottleneck().bias);
    kernels::GemmNN(d_e, net.bottleneck().weight, &d_h);
    for (int k = layers - 1; k >= 0; k--) {
      const Matrix &pre = c.pre[k];
      for (std::size_t i = 0; i < d_h.Size(); i++)
        if (!(pre.Data()[i] > 0.0)) d_h.Data()[i] = 0.0;
      const Matrix &in = k == 0 ? c.input : c.spliced[k];
      kernels::GemmTNAdd(d_h, in, &grad->hidden()[k].weight);
      AddColumnSums(d_h, &grad->hidden()[k].bias);
      if (k == 0) break;
      Matrix d_s;
      kernels::GemmNN(d_h, net.hidden()[k].weight, &d_s);
      Matrix d_prev(c.act[k - 1].NumRows(), c.act[k - 1].NumCols());
      internal::UnspliceAdd(d_s, spec.contexts[k], &d_prev);
      d_h = std::move(d_prev);
    }
  }
  return loss / static_cast<double>(valid);
}

}  // namespace

double ComputeLossAndGradient(const BlockSoftmaxNet &net, const TrainBatch &batch,
                              BlockSoftmaxNet *grad) {
  return Run(net, batch, grad);
}

double ComputeLoss(const BlockSoftmaxNet &net, const TrainBatch &batch) {
  return Run(net, batch, nullptr);
}

double TrainStep(BlockSoftmaxNet *net, const TrainBatch &batch, double learning_rate) {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  BlockSoftmaxNet grad;
  double loss = Run(*net, batch, &grad);
  auto apply = [&](AffineParams &p, const AffineParams &g) {
    kernels::Axpy(-learning_rate, g.weight.Values(), p.weight.Values());
    kernels::Axpy(-learning_rate, g.bias.Values(), p.bias.Values());
  };
  for (std::size_t k = 0; k < net->hidden().size(); k++)
    apply(net->hidden()[k], grad.hidden()[k]);
  apply(net->bottleneck(), grad.bottleneck());
  apply(net->outputs()[batch.block], grad.outputs()[batch.block]);
  return loss;
}

LanguageSampler::LanguageSampler(std::vector<double> frame_counts, SamplingPolicy policy,
                                 std::uint64_t seed)
    : weights_(std::move(frame_counts)), rng_(seed) {
  double total = 0.0;
  for (double &w : weights_) {
    if (w < 0.0) throw ConfigError("sampler: negative frame count");
    if (policy == SamplingPolicy::kUniform && w > 0.0) w = 1.0;
    total += w;
  }
  if (!(total > 0.0)) throw DataError("sampler: no language has data");
}

int LanguageSampler::Next() {
  return std::discrete_distribution<int>(weights_.begin(), weights_.end())(rng_.engine());
}

void FitInputNormalization(BlockSoftmaxNet *net, const std::vector<TrainUtterance> &data) {
  const std::size_t d = net->spec().feat_dim;
  std::vector<double> mean(d, 0.0), var(d, 0.0);
  double n = 0.0;
  for (const auto &u : data) {
    if (u.feats->NumCols() != d) throw DimensionError("normalization: feature dim mismatch");
    for (std::size_t t = 0; t < u.feats->NumRows(); t++) kernels::Axpy(1.0, u.feats->Row(t), mean);
    n += u.feats->NumRows();
  }
  if (n == 0.0) throw DataError("normalization: no frames");
  for (double &m : mean) m /= n;
  for (const auto &u : data)
    for (std::size_t t = 0; t < u.feats->NumRows(); t++)
      for (std::size_t j = 0; j < d; j++) {
        double v = (*u.feats)(t, j) - mean[j];
        var[j] += v * v;
      }
  for (double &v : var) v = std::sqrt(v / n);
  net->SetInputNormalization(mean, var);
}

TrainReport Train(BlockSoftmaxNet *net, const std::vector<TrainUtterance> &data,
                  const TrainSchedule &schedule) {
  const NetSpec &spec = net->spec();
  if (schedule.epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(schedule.learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (schedule.chunk_width < 1 || schedule.minibatch_frames < 1)
    throw ConfigError("chunk width and minibatch size must be >= 1");
  const std::size_t nb = spec.blocks.size();

  struct ChunkRef {
    std::size_t utt;
    long begin, end;
  };
  std::vector<std::vector<ChunkRef>> chunks(nb);
  std::vector<double> frames(nb, 0.0);
  for (std::size_t u = 0; u < data.size(); u++) {
    int b = spec.BlockIndex(data[u].lang);
    if (b < 0)
      throw ConfigError("training data has language '" + data[u].lang +
                        "' with no output block");
    const long n = static_cast<long>(data[u].feats->NumRows());
    if (data[u].targets.size() != static_cast<std::size_t>(n))
      throw DimensionError("utterance " + std::to_string(u) + ": " +
                           std::to_string(data[u].targets.size()) + " targets for " +
                           std::to_string(n) + " frames");
    for (long s = 0; s < n; s += schedule.chunk_width) {
      long e = std::min(n, s + schedule.chunk_width);
      bool labeled = false;
      for (long t = s; t < e; t++) labeled |= data[u].targets[t] >= 0;
      if (labeled) chunks[b].push_back({u, s, e});
    }
    frames[b] += static_cast<double>(n);
  }
  for (std::size_t b = 0; b < nb; b++)
    if (chunks[b].empty())
      throw DataError("no training data for block '" + spec.blocks[b].lang + "'");

  TrainReport report;
  report.batches_per_block.assign(nb, 0);
  const std::size_t per_batch =
      std::max(1, schedule.minibatch_frames / schedule.chunk_width);
  for (int epoch = 0; epoch < schedule.epochs; epoch++) {
    const double lr = schedule.learning_rate * std::pow(schedule.lr_decay, epoch);
    std::vector<std::vector<ChunkRef>> order = chunks;
    std::size_t steps = 0;
    for (std::size_t b = 0; b < nb; b++) {
      Rng rng(SubSeed(schedule.seed, epoch, b));
      std::shuffle(order[b].begin(), order[b].end(), rng.engine());
      steps += (order[b].size() + per_batch - 1) / per_batch;
    }
    LanguageSampler sampler(frames, schedule.policy, SubSeed(schedule.seed, epoch, 0xb10c));
    std::vector<std::size_t> cursor(nb, 0);
    std::vector<double> loss_sum(nb, 0.0);
    std::vector<int> count(nb, 0);
    for (std::size_t step = 0; step < steps; step++) {
      const int b = sampler.Next();
      TrainBatch batch;
      batch.block = b;
      for (std::size_t i = 0; i < per_batch; i++) {
        if (i > 0 && cursor[b] % order[b].size() == 0) break;  // end of the block's pass
        const ChunkRef &c = order[b][cursor[b] % order[b].size()];
        cursor[b]++;
        const TrainUtterance &u = data[c.utt];
        batch.chunks.push_back(
            {NetInputFor(spec, *u.feats, c.begin, c.end),
             std::vector<int>(u.targets.begin() + c.begin, u.targets.begin() + c.end)});
      }
      loss_sum[b] += TrainStep(net, batch, lr);
      count[b]++;
      report.batches_per_block[b]++;
    }
    std::vector<double> mean(nb);
    for (std::size_t b = 0; b < nb; b++)
      mean[b] = count[b] ? loss_sum[b] / count[b] : std::numeric_limits<double>::quiet_NaN();
    Log().info("epoch {} lr {:.4g} losses {}", epoch, lr, fmt::join(mean, " "));
    report.epoch_loss.push_back(std::move(mean));
  }
  if (!net->IsFinite()) throw InternalError("training produced non-finite parameters");
  return report;
}

}  // namespace mbnf
