// src/nnet/tdnn-ops.h

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

#ifndef MBNF_SRC_NNET_TDNN_OPS_H_
#define MBNF_SRC_NNET_TDNN_OPS_H_

#include <span>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/nnet/block-softmax-net.h"

namespace mbnf::internal {

// "Valid" splice: output row r concatenates rows r - min(offsets) + o.
// Output has rows - (max - min) rows.
Matrix SpliceValid(const Matrix &in, std::span<const int> offsets);
// Adjoint of SpliceValid: scatters d_out back onto *d_in (accumulating).
void UnspliceAdd(const Matrix &d_out, std::span<const int> offsets, Matrix *d_in);
// out = in * W' + b.
void AffineForward(const AffineParams &p, const Matrix &in, Matrix *out);

// Every intermediate of one forward pass.
struct ForwardCache {
  Matrix input;                  // normalized input rows
  std::vector<Matrix> spliced;   // input of hidden layer k (after splicing)
  std::vector<Matrix> pre;       // pre-activation of hidden layer k
  std::vector<Matrix> act;       // ReLU output of hidden layer k
  Matrix bottleneck;
};

void ForwardWithCache(const BlockSoftmaxNet &net, const Matrix &input, ForwardCache *c);

}  // namespace mbnf::internal

#endif  // MBNF_SRC_NNET_TDNN_OPS_H_
