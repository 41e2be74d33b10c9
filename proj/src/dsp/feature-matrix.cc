// src/dsp/feature-matrix.cc

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

#include "mbnf/dsp/feature-matrix.h"

#include <array>
#include <string>
#include <utility>

#include "mbnf/base/error.h"

namespace mbnf {
namespace {

constexpr std::array<std::pair<FeatureKind, std::string_view>, 7> kKindNames{{
    {FeatureKind::kMfcc13dd, "mfcc13dd"},
    {FeatureKind::kMfcc40, "mfcc40"},
    {FeatureKind::kPitch3, "pitch3"},
    {FeatureKind::kIvec, "ivec"},
    {FeatureKind::kBnf, "bnf"},
    {FeatureKind::kCombined, "combined"},
    {FeatureKind::kMfcc13, "mfcc13"},
}};

}  // namespace

std::string_view FeatureKindName(FeatureKind kind) {
  for (const auto &[k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<FeatureKind> ParseFeatureKind(std::string_view name) {
  for (const auto &[k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

void FeatureMatrix::Validate() const {
  if (!data.IsFinite())
    throw ValidationError("features " + utt_id + " contain NaN or Inf");
  std::size_t expected = 0;
  switch (kind) {
    case FeatureKind::kPitch3: expected = 3; break;
    case FeatureKind::kMfcc13: expected = 13; break;
    case FeatureKind::kMfcc13dd: expected = 39; break;
    default: break;
  }
  if (expected != 0 && data.NumRows() > 0 && data.NumCols() != expected)
    throw ValidationError("features " + utt_id + " of kind " +
                          std::string(FeatureKindName(kind)) + " have dim " +
                          std::to_string(data.NumCols()));
}

}  // namespace mbnf
