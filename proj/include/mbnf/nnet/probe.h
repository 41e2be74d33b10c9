// include/mbnf/nnet/probe.h

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

#ifndef MBNF_NNET_PROBE_H_
#define MBNF_NNET_PROBE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/nnet/block-softmax-net.h"
#include "mbnf/nnet/nnet-train.h"

namespace mbnf {

struct ProbeOptions {
  int epochs = 20;
  int minibatch_frames = 64;
  double learning_rate = 0.1;
  double lr_decay = 0.9;
  std::uint64_t seed = 0;
};

// Per-frame affine map into a block softmax, on standardized inputs. Weights
// start at zero.
class ProbeClassifier {
 public:
  ProbeClassifier(std::vector<OutputBlock> blocks, int dim);

  void Train(const std::vector<TrainUtterance> &data, const ProbeOptions &opts);
  Matrix Posteriors(const Matrix &feats, int block) const;
  std::vector<int> Predict(const Matrix &feats, int block) const;

  const std::vector<OutputBlock> &blocks() const { return blocks_; }
  int BlockIndex(const std::string &lang) const;

 private:
  void Standardize(std::span<const double> in, std::span<double> out) const;

  std::vector<OutputBlock> blocks_;
  int dim_;
  std::vector<double> shift_, scale_;
  std::vector<AffineParams> out_;
};

struct ProbeReport {
  std::vector<std::string> langs;
  std::vector<double> accuracy;       // per block, in [0, 1]; NaN without test frames
  std::vector<std::size_t> frames;    // labeled test frames per block
  double overall = 0.0;               // pooled over blocks
};

ProbeReport EvaluateProbe(const ProbeClassifier &probe, const std::vector<TrainUtterance> &test);

// Trains on train, scores labeled frames of test.
ProbeReport ProbeEval(const std::vector<OutputBlock> &blocks,
                      const std::vector<TrainUtterance> &train,
                      const std::vector<TrainUtterance> &test, const ProbeOptions &opts);

}  // namespace mbnf

#endif  // MBNF_NNET_PROBE_H_
