// include/mbnf/nnet/nnet-train.h

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

#ifndef MBNF_NNET_NNET_TRAIN_H_
#define MBNF_NNET_NNET_TRAIN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/base/rng.h"
#include "mbnf/nnet/block-softmax-net.h"

namespace mbnf {

// Contiguous frames of one utterance: input has the net's inner context
// around targets.size() frames (see NetInputFor). Target -1 is ignored.
struct TrainChunk {
  Matrix input;
  std::vector<int> targets;
};

// Single-language minibatch.
struct TrainBatch {
  int block = 0;
  std::vector<TrainChunk> chunks;
};

// Mean cross-entropy of the batch against its block. *grad is reshaped like
// net and receives d(loss)/d(params); other blocks' entries stay exactly 0.
double ComputeLossAndGradient(const BlockSoftmaxNet &net, const TrainBatch &batch,
                              BlockSoftmaxNet *grad);
double ComputeLoss(const BlockSoftmaxNet &net, const TrainBatch &batch);

// Plain SGD on the shared layers and the batch's block; returns the loss
// before the update.
double TrainStep(BlockSoftmaxNet *net, const TrainBatch &batch, double learning_rate);

enum class SamplingPolicy { kProportional, kUniform };

// Chooses the language of the next minibatch: with probability proportional
// to its frame count, or uniformly over languages with data.
class LanguageSampler {
 public:
  LanguageSampler(std::vector<double> frame_counts, SamplingPolicy policy,
                  std::uint64_t seed);
  int Next();

 private:
  std::vector<double> weights_;
  Rng rng_;
};

struct TrainUtterance {
  const Matrix *feats = nullptr;  // frames x feat_dim, unnormalized
  std::vector<int> targets;       // per frame; -1 for unlabeled frames
  std::string lang;
};

struct TrainSchedule {
  int epochs = 10;
  int minibatch_frames = 128;
  int chunk_width = 16;
  double learning_rate = 0.02;
  double lr_decay = 0.9;  // learning rate of epoch e is lr * decay^e
  SamplingPolicy policy = SamplingPolicy::kProportional;
  std::uint64_t seed = 0;
};

struct TrainReport {
  // epoch_loss[e][b]: mean minibatch loss of block b in epoch e (NaN if the
  // block drew no minibatch).
  std::vector<std::vector<double>> epoch_loss;
  std::vector<int> batches_per_block;
};

TrainReport Train(BlockSoftmaxNet *net, const std::vector<TrainUtterance> &data,
                  const TrainSchedule &schedule);

// Installs per-feature mean and standard deviation of the training frames as
// the net's input normalization.
void FitInputNormalization(BlockSoftmaxNet *net, const std::vector<TrainUtterance> &data);

}  // namespace mbnf

#endif  // MBNF_NNET_NNET_TRAIN_H_
