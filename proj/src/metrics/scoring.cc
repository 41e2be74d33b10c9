// src/metrics/scoring.cc

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

#include "mbnf/metrics/scoring.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include <fmt/format.h>

#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"

namespace mbnf {

std::optional<double> EditCounts::WerPercent() const {
  if (ref_tokens == 0) return std::nullopt;
  return 100.0 * static_cast<double>(Errors()) / static_cast<double>(ref_tokens);
}

EditCounts &EditCounts::operator+=(const EditCounts &o) {
  matches += o.matches;
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  ref_tokens += o.ref_tokens;
  return *this;
}

std::optional<double> SwitchStats::Percent() const {
  if (switch_points == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(switch_points);
}

SwitchStats &SwitchStats::operator+=(const SwitchStats &o) {
  switch_points += o.switch_points;
  correct += o.correct;
  return *this;
}

EditAlignment AlignTokens(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t n = ref.size(), m = hyp.size();
  std::vector<std::size_t> d((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t & { return d[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; i++) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; j++) at(0, j) = j;
  for (std::size_t i = 1; i <= n; i++)
    for (std::size_t j = 1; j <= m; j++)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});

  EditAlignment out;
  out.counts.ref_tokens = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t cur = at(i, j);
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && cur == at(i - 1, j - 1)) {
      out.steps.push_back({EditOp::kMatch, int(i - 1), int(j - 1)});
      out.counts.matches++;
      i--, j--;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] && cur == at(i - 1, j - 1) + 1) {
      out.steps.push_back({EditOp::kSub, int(i - 1), int(j - 1)});
      out.counts.substitutions++;
      i--, j--;
    } else if (i > 0 && cur == at(i - 1, j) + 1) {
      out.steps.push_back({EditOp::kDel, int(i - 1), -1});
      out.counts.deletions++;
      i--;
    } else {
      out.steps.push_back({EditOp::kIns, -1, int(j - 1)});
      out.counts.insertions++;
      j--;
    }
  }
  std::reverse(out.steps.begin(), out.steps.end());
  return out;
}

std::map<std::string, EditCounts> LanguageCounts(std::span<const Token> ref,
                                                 const EditAlignment &alignment) {
  std::map<std::string, EditCounts> out;
  for (const Token &t : ref) out[t.lang].ref_tokens++;
  int last_ref = -1;
  for (const EditStep &s : alignment.steps) {
    if (s.op == EditOp::kIns) {
      if (ref.empty()) throw ValidationError("insertions against an empty reference");
      out[ref[last_ref < 0 ? 0 : last_ref].lang].insertions++;
      continue;
    }
    last_ref = s.ref;
    EditCounts &c = out[ref[s.ref].lang];
    if (s.op == EditOp::kMatch) c.matches++;
    if (s.op == EditOp::kSub) c.substitutions++;
    if (s.op == EditOp::kDel) c.deletions++;
  }
  return out;
}

SwitchStats CsBigramCorrect(std::span<const Token> ref, const EditAlignment &alignment,
                            bool strict) {
  std::vector<bool> matched(ref.size(), false);
  for (const EditStep &s : alignment.steps)
    if (s.op == EditOp::kMatch) matched[s.ref] = true;
  SwitchStats out;
  for (std::size_t i = 1; i < ref.size(); i++) {
    if (ref[i].lang == ref[i - 1].lang) continue;
    out.switch_points++;
    out.correct += matched[i] && (!strict || matched[i - 1]);
  }
  return out;
}

std::vector<Hypothesis> ParseHypotheses(std::istream &in) {
  std::vector<Hypothesis> out;
  std::set<std::string> seen;
  std::string line;
  for (int lineno = 1; std::getline(in, line); lineno++) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto tab = line.find('\t');
    Hypothesis h;
    h.utt_id = line.substr(0, tab);
    if (h.utt_id.empty() || h.utt_id.find(' ') != std::string::npos)
      throw ParseError("hypothesis line " + std::to_string(lineno) + ": bad utterance id");
    if (!seen.insert(h.utt_id).second)
      throw ValidationError("hypothesis line " + std::to_string(lineno) + ": duplicate id " +
                            h.utt_id);
    if (tab != std::string::npos) {
      std::istringstream words(line.substr(tab + 1));
      for (std::string w; words >> w;) h.words.push_back(w);
    }
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<Hypothesis> LoadHypotheses(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open hypothesis file " + path);
  return ParseHypotheses(in);
}

void WriteHypotheses(const std::vector<Hypothesis> &hyps, std::ostream &out) {
  for (const auto &h : hyps) {
    out << h.utt_id << '\t';
    for (std::size_t i = 0; i < h.words.size(); i++) out << (i ? " " : "") << h.words[i];
    out << '\n';
  }
}

ScoreReport ScoreCorpus(const std::vector<UtteranceRecord> &refs,
                        const std::vector<Hypothesis> &hyps) {
  std::unordered_map<std::string, const Hypothesis *> by_id;
  std::set<std::string> ref_ids;
  for (const auto &r : refs) ref_ids.insert(r.utt_id);
  std::vector<std::string> unknown;
  for (const auto &h : hyps) {
    if (!ref_ids.count(h.utt_id)) unknown.push_back(h.utt_id);
    by_id[h.utt_id] = &h;
  }
  if (!unknown.empty()) {
    std::string ids;
    for (const auto &id : unknown) ids += (ids.empty() ? "" : ", ") + id;
    throw DataError("hypotheses without a reference: " + ids);
  }

  ScoreReport report;
  static const Hypothesis kEmpty;
  std::size_t missing = 0;
  for (const auto &r : refs) {
    if (r.tokens.empty()) throw ValidationError("empty reference for " + r.utt_id);
    auto it = by_id.find(r.utt_id);
    const Hypothesis &h = it == by_id.end() ? (missing++, kEmpty) : *it->second;
    std::vector<std::string> words;
    for (const Token &t : r.tokens) {
      words.push_back(t.word);
      if (std::find(report.langs.begin(), report.langs.end(), t.lang) == report.langs.end())
        report.langs.push_back(t.lang);
    }
    EditAlignment a = AlignTokens(words, h.words);
    report.overall += a.counts;
    for (const auto &[lang, c] : LanguageCounts(r.tokens, a)) report.per_language[lang] += c;
    report.cs += CsBigramCorrect(r.tokens, a, false);
    report.cs_strict += CsBigramCorrect(r.tokens, a, true);
    report.num_utterances++;
  }
  if (missing) Log().warn("{} references have no hypothesis; scored as all deletions", missing);
  return report;
}

namespace {

nlohmann::ordered_json CountsJson(const EditCounts &c) {
  nlohmann::ordered_json j;
  j["substitutions"] = c.substitutions;
  j["deletions"] = c.deletions;
  j["insertions"] = c.insertions;
  j["ref_tokens"] = c.ref_tokens;
  auto wer = c.WerPercent();
  j["wer"] = wer ? nlohmann::ordered_json(*wer) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string Pct(std::optional<double> v) { return v ? fmt::format("{:.2f}", *v) : "-"; }

}  // namespace

nlohmann::ordered_json ScoreReport::ToJson() const {
  nlohmann::ordered_json j;
  j["num_utterances"] = num_utterances;
  j["overall"] = CountsJson(overall);
  nlohmann::ordered_json langs_json = nlohmann::ordered_json::object();
  for (const auto &l : langs) langs_json[l] = CountsJson(per_language.at(l));
  j["languages"] = langs_json;
  j["switch_points"] = cs.switch_points;
  auto p = cs.Percent();
  j["cs_bigram_correct"] = p ? nlohmann::ordered_json(*p) : nlohmann::ordered_json(nullptr);
  auto ps = cs_strict.Percent();
  j["cs_bigram_correct_strict"] =
      ps ? nlohmann::ordered_json(*ps) : nlohmann::ordered_json(nullptr);
  return j;
}

std::string ScoreReport::ToTable() const {
  std::string out = fmt::format("{:<10} {:>8} {:>6} {:>6} {:>6} {:>8}\n", "scope", "ref",
                                "sub", "del", "ins", "WER%");
  auto row = [&](const std::string &name, const EditCounts &c) {
    out += fmt::format("{:<10} {:>8} {:>6} {:>6} {:>6} {:>8}\n", name, c.ref_tokens,
                       c.substitutions, c.deletions, c.insertions, Pct(c.WerPercent()));
  };
  for (const auto &l : langs) row(l, per_language.at(l));
  row("overall", overall);
  out += fmt::format("switch points {}, cs bigram correct {}%\n", cs.switch_points,
                     Pct(cs.Percent()));
  return out;
}

}  // namespace mbnf
