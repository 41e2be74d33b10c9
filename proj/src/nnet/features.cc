// src/nnet/features.cc

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

#include "mbnf/nnet/features.h"

#include <algorithm>
#include <string>

#include "mbnf/base/error.h"

namespace mbnf {

FeatureMatrix ExtractBnf(const BlockSoftmaxNet &net, const FeatureMatrix &feats) {
  if (feats.NumFrames() == 0) throw DataError("ExtractBnf: no frames in " + feats.utt_id);
  if (feats.Dim() != static_cast<std::size_t>(net.spec().feat_dim))
    throw DimensionError("ExtractBnf: " + feats.utt_id + " has dim " +
                         std::to_string(feats.Dim()) + ", net expects " +
                         std::to_string(net.spec().feat_dim));
  Matrix input = NetInputFor(net.spec(), feats.data, 0, static_cast<long>(feats.NumFrames()));
  FeatureMatrix out;
  out.utt_id = feats.utt_id;
  out.kind = FeatureKind::kBnf;
  out.frame_shift_ms = feats.frame_shift_ms;
  net.Forward(input, -1, &out.data, nullptr);
  return out;
}

FeatureMatrix CombineFeatures(const std::vector<const FeatureMatrix *> &parts,
                              std::span<const double> ivector,
                              std::optional<std::size_t> num_frames) {
  std::vector<const FeatureMatrix *> ordered;
  for (const auto *p : parts)
    if (p->kind != FeatureKind::kBnf) ordered.push_back(p);
  const std::size_t num_front = ordered.size();
  for (const auto *p : parts)
    if (p->kind == FeatureKind::kBnf) ordered.push_back(p);

  FeatureMatrix out;
  out.kind = FeatureKind::kCombined;
  std::size_t frames = 0;
  if (!parts.empty()) {
    out.utt_id = parts[0]->utt_id;
    out.frame_shift_ms = parts[0]->frame_shift_ms;
    frames = parts[0]->NumFrames();
    for (const auto *p : parts)
      if (p->NumFrames() != frames || p->frame_shift_ms != out.frame_shift_ms)
        throw DimensionError(
            "CombineFeatures: " + std::string(FeatureKindName(parts[0]->kind)) + " has " +
            std::to_string(frames) + " frames but " + std::string(FeatureKindName(p->kind)) +
            " has " + std::to_string(p->NumFrames()) + " (utterance " + p->utt_id + ")");
    if (num_frames && *num_frames != frames)
      throw DimensionError("CombineFeatures: expected " + std::to_string(*num_frames) +
                           " frames, parts have " + std::to_string(frames));
  } else {
    if (!num_frames) throw ValidationError("CombineFeatures: no parts and no frame count");
    frames = *num_frames;
  }
  std::size_t dim = ivector.size();
  for (const auto *p : parts) dim += p->Dim();
  out.data.Resize(frames, dim);
  for (std::size_t t = 0; t < frames; t++) {
    auto row = out.data.Row(t).begin();
    for (std::size_t i = 0; i < ordered.size(); i++) {
      if (i == num_front) row = std::copy(ivector.begin(), ivector.end(), row);
      auto src = ordered[i]->data.Row(t);
      row = std::copy(src.begin(), src.end(), row);
    }
    if (num_front == ordered.size()) std::copy(ivector.begin(), ivector.end(), row);
  }
  return out;
}

}  // namespace mbnf
