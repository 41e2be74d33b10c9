// include/mbnf/dsp/feature-matrix.h

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

#ifndef MBNF_DSP_FEATURE_MATRIX_H_
#define MBNF_DSP_FEATURE_MATRIX_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "mbnf/base/matrix.h"

namespace mbnf {

// Numeric values double as archive record kinds.
enum class FeatureKind : std::uint8_t {
  kMfcc13dd = 1,
  kMfcc40 = 2,
  kPitch3 = 3,
  kIvec = 4,
  kBnf = 5,
  kCombined = 6,
  kMfcc13 = 14,  // static cepstra before deltas are appended
};

std::string_view FeatureKindName(FeatureKind kind);
std::optional<FeatureKind> ParseFeatureKind(std::string_view name);

// frames x dims feature matrix on a fixed frame grid.
struct FeatureMatrix {
  std::string utt_id;
  FeatureKind kind = FeatureKind::kMfcc40;
  Matrix data;
  int frame_shift_ms = 10;

  std::size_t NumFrames() const { return data.NumRows(); }
  std::size_t Dim() const { return data.NumCols(); }
  // Finite values and the fixed dimension of kinds that have one.
  void Validate() const;
};

}  // namespace mbnf

#endif  // MBNF_DSP_FEATURE_MATRIX_H_
