// include/mbnf/metrics/scoring.h

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

#ifndef MBNF_METRICS_SCORING_H_
#define MBNF_METRICS_SCORING_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "mbnf/corpus/corpus.h"

namespace mbnf {

enum class EditOp : std::uint8_t { kMatch, kSub, kDel, kIns };

struct EditStep {
  EditOp op;
  int ref = -1;  // index into ref, -1 for insertions
  int hyp = -1;  // index into hyp, -1 for deletions
};

struct EditCounts {
  std::size_t matches = 0;
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t ref_tokens = 0;

  std::size_t Errors() const { return substitutions + deletions + insertions; }
  // 100 (S + D + I) / N; absent when N == 0.
  std::optional<double> WerPercent() const;
  EditCounts &operator+=(const EditCounts &o);
  bool operator==(const EditCounts &) const = default;
};

struct EditAlignment {
  std::vector<EditStep> steps;
  EditCounts counts;
};

// Minimum unit-cost edit alignment. Backtrace prefers match, then
// substitution, deletion, insertion.
EditAlignment AlignTokens(std::span<const std::string> ref, std::span<const std::string> hyp);

// Errors charged to the language of the aligned reference token. An insertion
// goes to the closest reference token before it, or to the first reference
// token when it precedes all of them.
std::map<std::string, EditCounts> LanguageCounts(std::span<const Token> ref,
                                                 const EditAlignment &alignment);

struct SwitchStats {
  std::size_t switch_points = 0;
  std::size_t correct = 0;
  std::optional<double> Percent() const;
  SwitchStats &operator+=(const SwitchStats &o);
};

// A switch point is a reference position i > 0 whose language differs from
// position i - 1. It is correct when token i is a match; with strict, token
// i - 1 must match as well.
SwitchStats CsBigramCorrect(std::span<const Token> ref, const EditAlignment &alignment,
                            bool strict = false);

struct Hypothesis {
  std::string utt_id;
  std::vector<std::string> words;
};

// Lines of "utt_id<TAB>word word ...". Blank lines are skipped.
std::vector<Hypothesis> ParseHypotheses(std::istream &in);
std::vector<Hypothesis> LoadHypotheses(const std::string &path);
void WriteHypotheses(const std::vector<Hypothesis> &hyps, std::ostream &out);

struct ScoreReport {
  std::vector<std::string> langs;  // first appearance in the references
  std::map<std::string, EditCounts> per_language;
  EditCounts overall;
  SwitchStats cs;
  SwitchStats cs_strict;
  std::size_t num_utterances = 0;

  nlohmann::ordered_json ToJson() const;
  std::string ToTable() const;
};

// Micro-averaged over utterances. A reference without a hypothesis is scored
// against an empty hypothesis.
ScoreReport ScoreCorpus(const std::vector<UtteranceRecord> &refs,
                        const std::vector<Hypothesis> &hyps);

}  // namespace mbnf

#endif  // MBNF_METRICS_SCORING_H_
