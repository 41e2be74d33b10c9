// tests/oracle/edit-oracle.h

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

#ifndef MBNF_TESTS_ORACLE_EDIT_ORACLE_H_
#define MBNF_TESTS_ORACLE_EDIT_ORACLE_H_

#include <algorithm>
#include <string>
#include <vector>

namespace mbnf::oracle {

// Cheapest edit script by exhaustive recursion over every script (no
// memoization); only usable for very short sequences.
inline int BruteEditDistance(const std::vector<std::string> &ref,
                             const std::vector<std::string> &hyp, std::size_t i = 0,
                             std::size_t j = 0) {
  if (i == ref.size()) return static_cast<int>(hyp.size() - j);
  if (j == hyp.size()) return static_cast<int>(ref.size() - i);
  int best = BruteEditDistance(ref, hyp, i + 1, j) + 1;
  best = std::min(best, BruteEditDistance(ref, hyp, i, j + 1) + 1);
  best = std::min(best, BruteEditDistance(ref, hyp, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1));
  return best;
}

// All strings over {a, b} of length <= max_len.
inline std::vector<std::vector<std::string>> AllBinarySequences(int max_len) {
  std::vector<std::vector<std::string>> out{{}};
  for (int len = 1; len <= max_len; len++)
    for (int bits = 0; bits < (1 << len); bits++) {
      std::vector<std::string> s;
      for (int k = 0; k < len; k++) s.push_back((bits >> k) & 1 ? "b" : "a");
      out.push_back(s);
    }
  return out;
}

}  // namespace mbnf::oracle

#endif  // MBNF_TESTS_ORACLE_EDIT_ORACLE_H_
