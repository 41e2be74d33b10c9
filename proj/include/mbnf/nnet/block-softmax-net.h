// include/mbnf/nnet/block-softmax-net.h

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

#ifndef MBNF_NNET_BLOCK_SOFTMAX_NET_H_
#define MBNF_NNET_BLOCK_SOFTMAX_NET_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mbnf/base/matrix.h"

namespace mbnf {

struct OutputBlock {
  std::string lang;
  int size = 0;

  bool operator==(const OutputBlock &) const = default;
};

// Geometry of a TDNN with shared ReLU layers, a linear bottleneck and one
// softmax block per language. contexts[0] splices the input features; layer
// k > 0 splices the outputs of layer k - 1 at the offsets contexts[k].
struct NetSpec {
  int feat_dim = 0;
  int hidden_dim = 64;
  int num_hidden = 3;
  std::vector<std::vector<int>> contexts;
  int bottleneck_dim = 8;
  std::vector<OutputBlock> blocks;
  std::uint64_t seed = 0;

  // {-2..2}, then {-1,0,1} for the next two layers, then {0}.
  static std::vector<std::vector<int>> DefaultContexts(int num_hidden);

  int InputDim() const { return feat_dim * static_cast<int>(contexts.at(0).size()); }
  // Frames of extra context consumed by layers after the first.
  int InnerLeftContext() const;
  int InnerRightContext() const;
  // Total receptive field, input splicing included.
  int LeftContext() const;
  int RightContext() const;
  int BlockIndex(const std::string &lang) const;  // -1 when absent
  void Validate() const;

  bool operator==(const NetSpec &) const = default;
};

struct AffineParams {
  Matrix weight;  // out x in
  Matrix bias;    // 1 x out
};

class BlockSoftmaxNet {
 public:
  BlockSoftmaxNet() = default;
  // He-normal weights (sd sqrt(2 / fan_in)) from spec.seed, zero biases,
  // identity input normalization.
  explicit BlockSoftmaxNet(const NetSpec &spec);

  const NetSpec &spec() const { return spec_; }
  std::vector<AffineParams> &hidden() { return hidden_; }
  const std::vector<AffineParams> &hidden() const { return hidden_; }
  AffineParams &bottleneck() { return bottleneck_; }
  const AffineParams &bottleneck() const { return bottleneck_; }
  std::vector<AffineParams> &outputs() { return outputs_; }
  const std::vector<AffineParams> &outputs() const { return outputs_; }

  // Fixed per-column affine map applied to spliced input rows, (x - shift) * scale.
  // Not trained.
  std::vector<double> &input_shift() { return input_shift_; }
  std::vector<double> &input_scale() { return input_scale_; }
  const std::vector<double> &input_shift() const { return input_shift_; }
  const std::vector<double> &input_scale() const { return input_scale_; }
  // Sets shift/scale to standardize per-feature statistics (replicated over
  // the input offsets).
  void SetInputNormalization(std::span<const double> feat_mean,
                             std::span<const double> feat_stddev);

  // Trainable parameter matrices in serialization order: hidden layers
  // (weight, bias) in order, bottleneck (weight, bias), blocks (weight, bias).
  std::vector<Matrix *> Params();
  std::vector<const Matrix *> Params() const;
  std::size_t NumParams() const;
  void SetZero();
  bool IsFinite() const;

  // input: rows of spliced input (InputDim columns). Produces
  // rows - InnerLeftContext - InnerRightContext output rows. When block >= 0
  // only that block's posteriors are computed; posteriors may be null.
  void Forward(const Matrix &input, int block, Matrix *bottleneck,
               std::vector<Matrix> *posteriors) const;

  // Exact equality of spec, normalization and every parameter.
  bool operator==(const BlockSoftmaxNet &o) const;

 private:
  NetSpec spec_;
  std::vector<double> input_shift_;
  std::vector<double> input_scale_;
  std::vector<AffineParams> hidden_;
  AffineParams bottleneck_;
  std::vector<AffineParams> outputs_;
};

// Each output row t concatenates input rows clamp(t + o) for o in offsets,
// for t in [begin, end). Rows outside the input replicate the first/last row.
Matrix SpliceRange(const Matrix &feats, std::span<const int> offsets, long begin,
                   long end);
Matrix Splice(const Matrix &feats, std::span<const int> offsets);

// Spliced net input for frames [begin, end) of an utterance, including the
// inner context, so that Forward yields end - begin rows.
Matrix NetInputFor(const NetSpec &spec, const Matrix &feats, long begin, long end);

// Row-wise softmax in place.
void SoftmaxRows(Matrix *m);

}  // namespace mbnf

#endif  // MBNF_NNET_BLOCK_SOFTMAX_NET_H_
