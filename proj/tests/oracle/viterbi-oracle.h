// tests/oracle/viterbi-oracle.h

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

#ifndef MBNF_TESTS_ORACLE_VITERBI_ORACLE_H_
#define MBNF_TESTS_ORACLE_VITERBI_ORACLE_H_

#include <functional>
#include <limits>
#include <vector>

#include "mbnf/base/matrix.h"

namespace mbnf::oracle {

// Exhaustive search over all monotone paths from state 0 to state S - 1.
inline double BruteForceBest(const Matrix &emit, const std::vector<double> &self,
                             const std::vector<double> &next, std::vector<int> *best_path) {
  const int frames = emit.NumRows(), states = emit.NumCols();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> path(frames);
  std::function<void(int, int, double)> rec = [&](int t, int s, double score) {
    path[t] = s;
    score += emit(t, s);
    if (t == frames - 1) {
      if (s == states - 1 && score > best) best = score, *best_path = path;
      return;
    }
    rec(t + 1, s, score + self[s]);
    if (s + 1 < states) rec(t + 1, s + 1, score + next[s]);
  };
  rec(0, 0, 0.0);
  return best;
}

}  // namespace mbnf::oracle

#endif  // MBNF_TESTS_ORACLE_VITERBI_ORACLE_H_
