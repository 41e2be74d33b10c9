// include/mbnf/corpus/alignment.h

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

#ifndef MBNF_CORPUS_ALIGNMENT_H_
#define MBNF_CORPUS_ALIGNMENT_H_

#include <cstdint>
#include <string>
#include <vector>

namespace mbnf {

// Frame-level phone-state labels. States are numbered within each language's
// block as phone_index * states_per_phone + state_within_phone. Code-switched
// utterances carry a per-frame language as well.
struct AlignmentMatrix {
  std::string utt_id;
  int lang = -1;  // language index when every frame has the same language, else -1
  std::vector<std::uint32_t> frame_lang;
  std::vector<std::uint32_t> frame_state;

  std::size_t NumFrames() const { return frame_state.size(); }
  bool operator==(const AlignmentMatrix &) const = default;
};

}  // namespace mbnf

#endif  // MBNF_CORPUS_ALIGNMENT_H_
