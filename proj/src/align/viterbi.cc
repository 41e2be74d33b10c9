// src/align/viterbi.cc

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

#include "mbnf/align/viterbi.h"

#include <limits>
#include <string>

#include "mbnf/base/error.h"

namespace mbnf {

ViterbiResult ViterbiDecode(const Matrix &emit, std::span<const double> log_self,
                            std::span<const double> log_next) {
  const std::size_t frames = emit.NumRows(), states = emit.NumCols();
  if (states == 0) throw ValidationError("Viterbi: empty state sequence");
  if (log_self.size() != states || log_next.size() != states)
    throw DimensionError("Viterbi: transition vectors do not match the state count");
  if (frames < states)
    throw DataError("Viterbi: " + std::to_string(frames) + " frames cannot visit " +
                    std::to_string(states) + " states");
  const double kNegInf = -std::numeric_limits<double>::infinity();
  Matrix score(frames, states, kNegInf);
  // back(t, i) is 1 when frame t was entered from state i - 1.
  std::vector<unsigned char> back(frames * states, 0);
  score(0, 0) = emit(0, 0);
  for (std::size_t t = 1; t < frames; t++) {
    // State i is reachable at t only if i <= t and the rest still fits.
    const std::size_t lo = states - 1 > frames - 1 - t ? states - 1 - (frames - 1 - t) : 0;
    const std::size_t hi = std::min(t, states - 1);
    for (std::size_t i = lo; i <= hi; i++) {
      double stay = score(t - 1, i) + log_self[i];
      double enter = i > 0 ? score(t - 1, i - 1) + log_next[i - 1] : kNegInf;
      if (enter > stay) {
        score(t, i) = enter + emit(t, i);
        back[t * states + i] = 1;
      } else {
        score(t, i) = stay + emit(t, i);
      }
    }
  }
  ViterbiResult res;
  res.loglik = score(frames - 1, states - 1);
  res.path.resize(frames);
  std::size_t i = states - 1;
  for (std::size_t t = frames; t-- > 0;) {
    res.path[t] = static_cast<int>(i);
    if (t > 0 && back[t * states + i]) i--;
  }
  return res;
}

}  // namespace mbnf
