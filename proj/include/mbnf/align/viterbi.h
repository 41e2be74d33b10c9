// include/mbnf/align/viterbi.h

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

#ifndef MBNF_ALIGN_VITERBI_H_
#define MBNF_ALIGN_VITERBI_H_

#include <span>
#include <vector>

#include "mbnf/base/matrix.h"

namespace mbnf {

struct ViterbiResult {
  std::vector<int> path;  // composed-state index per frame
  double loglik = 0.0;    // emissions plus the T - 1 inter-frame transitions
};

// Best monotone path through a left-to-right chain of S states: the first
// frame is in state 0, the last in state S - 1, and each step either stays
// (log_self[i]) or advances by one (log_next[i]). emit is T x S. Throws
// DataError when T < S.
ViterbiResult ViterbiDecode(const Matrix &emit, std::span<const double> log_self,
                            std::span<const double> log_next);

}  // namespace mbnf

#endif  // MBNF_ALIGN_VITERBI_H_
