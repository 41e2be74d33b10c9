// include/mbnf/align/mono-hmm.h

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

#ifndef MBNF_ALIGN_MONO_HMM_H_
#define MBNF_ALIGN_MONO_HMM_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/corpus/alignment.h"
#include "mbnf/corpus/corpus.h"
#include "mbnf/gmm/diag-gmm.h"

namespace mbnf {

struct MonoHmmOptions {
  int num_gauss = 4;
  double init_self_loop = 0.75;
  double trans_floor = 1e-4;
  // EM iterations when fitting each state's GMM at flat start.
  int init_gmm_iters = 3;
  double var_floor = DiagGmm::kDefaultVarFloor;
  std::uint64_t seed = 0;
  int num_jobs = 1;
};

// Left-to-right monophone HMMs of one language. State ids follow the block
// numbering phone_index * states_per_phone + state_within_phone.
struct MonoHmmSet {
  PhoneSet phoneset;
  std::vector<DiagGmm> emissions;
  std::vector<double> log_self;
  std::vector<double> log_next;

  int NumStates() const { return static_cast<int>(emissions.size()); }
  // Throws ValidationError if a transition pair does not sum to 1 or an
  // emission violates the GMM invariants.
  void Validate(double var_floor = DiagGmm::kDefaultVarFloor) const;
};

// Utterance with its features and phone transcript, as seen by the aligner.
struct AlignInput {
  const UtteranceRecord *record;
  const Matrix *feats;
};

struct FlatStartResult {
  MonoHmmSet hmms;
  std::vector<std::string> skipped;  // more transcript states than frames
};

FlatStartResult FlatStart(const std::vector<AlignInput> &utts, const PhoneSet &phoneset,
                          const MonoHmmOptions &opts);

struct AlignResult {
  AlignmentMatrix alignment;
  std::vector<int> path;  // position in the composed state chain per frame
  double loglik = 0.0;
};

// Forced alignment against the concatenation of the transcript's phone HMMs.
AlignResult ViterbiAlign(const MonoHmmSet &hmms, const Matrix &feats,
                         const UtteranceRecord &record);

// Code-switched variant: each phone is taken from the HMM set of its language.
AlignResult ViterbiAlignMixed(const std::vector<const MonoHmmSet *> &sets,
                              const LanguageInventory &inventory, const Matrix &feats,
                              const UtteranceRecord &record);

struct MonophoneResult {
  MonoHmmSet hmms;
  // Total Viterbi log-likelihood of the trainable utterances under the model
  // before each iteration and after the last: iters + 1 entries.
  std::vector<double> loglik;
  std::vector<std::string> skipped;
};

// Flat start followed by iters rounds of hard-count Viterbi re-estimation.
MonophoneResult TrainMonophone(const std::vector<AlignInput> &utts,
                               const PhoneSet &phoneset, int iters,
                               const MonoHmmOptions &opts);

// Block-local target per frame: the state index for frames of `lang`, -1 for
// frames of other languages. Throws InternalError for indices outside the block.
std::vector<int> AlignmentToTargets(const AlignmentMatrix &alignment, int lang,
                                    int block_size);

}  // namespace mbnf

#endif  // MBNF_ALIGN_MONO_HMM_H_
