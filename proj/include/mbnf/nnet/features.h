// include/mbnf/nnet/features.h

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

#ifndef MBNF_NNET_FEATURES_H_
#define MBNF_NNET_FEATURES_H_

#include <optional>
#include <span>
#include <vector>

#include "mbnf/dsp/feature-matrix.h"
#include "mbnf/nnet/block-softmax-net.h"

namespace mbnf {

// Bottleneck activations for every frame of feats (kind bnf).
FeatureMatrix ExtractBnf(const BlockSoftmaxNet &net, const FeatureMatrix &feats);

// Frame-wise concatenation. Columns: non-bnf parts in the given order, then
// the i-vector repeated on every frame, then bnf parts. With no parts the
// frame count must be given.
FeatureMatrix CombineFeatures(const std::vector<const FeatureMatrix *> &parts,
                              std::span<const double> ivector,
                              std::optional<std::size_t> num_frames = std::nullopt);

}  // namespace mbnf

#endif  // MBNF_NNET_FEATURES_H_
