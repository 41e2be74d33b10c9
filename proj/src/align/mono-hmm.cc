// src/align/mono-hmm.cc

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

#include "mbnf/align/mono-hmm.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "mbnf/align/viterbi.h"
#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"
#include "mbnf/base/parallel.h"
#include "mbnf/base/rng.h"
#include "mbnf/gmm/gmm-em.h"

namespace mbnf {
namespace {

// One state of a composed left-to-right graph.
struct GraphState {
  const MonoHmmSet *set;
  int lang;
  int state;
};

std::vector<GraphState> Compose(const std::vector<const MonoHmmSet *> &by_lang,
                                const LanguageInventory *inventory,
                                const UtteranceRecord &rec) {
  if (rec.phones.empty())
    throw ValidationError(rec.utt_id + ": empty phone sequence");
  std::vector<GraphState> graph;
  for (const auto &p : rec.phones) {
    const MonoHmmSet *set = nullptr;
    int lang = 0;
    if (inventory) {
      lang = inventory->Require(p.lang).index;
      if (static_cast<std::size_t>(lang) >= by_lang.size() || !by_lang[lang])
        throw ConfigError(rec.utt_id + ": no HMMs for language '" + p.lang + "'");
      set = by_lang[lang];
    } else {
      set = by_lang[0];
      lang = set->phoneset.lang().index;
      if (p.lang != set->phoneset.lang().code)
        throw ValidationError(rec.utt_id + ": phone language '" + p.lang +
                              "' differs from the HMM language '" +
                              set->phoneset.lang().code + "'");
    }
    int phone = set->phoneset.RequirePhone(p.phone);
    int spp = set->phoneset.states_per_phone();
    for (int s = 0; s < spp; s++) graph.push_back({set, lang, phone * spp + s});
  }
  return graph;
}

AlignResult AlignGraph(const std::vector<GraphState> &graph, const Matrix &feats,
                       const std::string &utt_id) {
  const std::size_t frames = feats.NumRows(), states = graph.size();
  if (frames < states)
    throw DataError(utt_id + ": " + std::to_string(frames) + " frames for " +
                    std::to_string(states) + " states");
  // Emission scores are computed once per distinct (set, state) pair.
  std::map<std::pair<const MonoHmmSet *, int>, std::vector<double>> cache;
  Matrix emit(frames, states);
  std::vector<double> self(states), next(states);
  for (std::size_t i = 0; i < states; i++) {
    const GraphState &g = graph[i];
    auto [it, fresh] = cache.try_emplace({g.set, g.state});
    if (fresh) {
      const DiagGmm &gmm = g.set->emissions[g.state];
      it->second.resize(frames);
      for (std::size_t t = 0; t < frames; t++) it->second[t] = gmm.LogLik(feats.Row(t));
    }
    for (std::size_t t = 0; t < frames; t++) emit(t, i) = it->second[t];
    self[i] = g.set->log_self[g.state];
    next[i] = g.set->log_next[g.state];
  }
  ViterbiResult v = ViterbiDecode(emit, self, next);
  AlignResult res;
  res.loglik = v.loglik;
  res.path = v.path;
  res.alignment.utt_id = utt_id;
  res.alignment.lang = graph.front().lang;
  for (int i : v.path) {
    res.alignment.frame_lang.push_back(graph[i].lang);
    res.alignment.frame_state.push_back(graph[i].state);
    if (graph[i].lang != res.alignment.lang) res.alignment.lang = -1;
  }
  return res;
}

void CheckInputs(const std::vector<AlignInput> &utts, const PhoneSet &ps) {
  for (const auto &u : utts) {
    if (u.record->phones.empty())
      throw ValidationError(u.record->utt_id + ": empty phone sequence");
    for (const auto &p : u.record->phones) {
      if (p.lang != ps.lang().code)
        throw ValidationError(u.record->utt_id + ": phone language '" + p.lang +
                              "' differs from '" + ps.lang().code + "'");
      ps.RequirePhone(p.phone);
    }
  }
}

void SetTransitions(MonoHmmSet *h, int state, double self, double floor) {
  self = std::clamp(self, floor, 1.0 - floor);
  h->log_self[state] = std::log(self);
  h->log_next[state] = std::log1p(-self);
}

}  // namespace

void MonoHmmSet::Validate(double var_floor) const {
  if (NumStates() != phoneset.BlockSize() ||
      log_self.size() != emissions.size() || log_next.size() != emissions.size())
    throw ValidationError("MonoHmmSet: state count does not match the phone set");
  for (int s = 0; s < NumStates(); s++) {
    if (std::abs(std::exp(log_self[s]) + std::exp(log_next[s]) - 1.0) > 1e-9)
      throw ValidationError("MonoHmmSet: transitions of state " + std::to_string(s) +
                            " do not sum to 1");
    emissions[s].Validate(var_floor);
  }
}

FlatStartResult FlatStart(const std::vector<AlignInput> &utts, const PhoneSet &ps,
                          const MonoHmmOptions &opts) {
  CheckInputs(utts, ps);
  const int spp = ps.states_per_phone(), block = ps.BlockSize();
  FlatStartResult res;
  std::vector<Matrix> assigned(block);
  Matrix all;
  for (const auto &u : utts) {
    const std::size_t frames = u.feats->NumRows();
    const std::size_t states = u.record->phones.size() * spp;
    if (frames < states) {
      Log().warn("flat start: skipping {} ({} frames < {} states)", u.record->utt_id,
                 frames, states);
      res.skipped.push_back(u.record->utt_id);
      continue;
    }
    for (std::size_t k = 0; k < states; k++) {
      int state = ps.RequirePhone(u.record->phones[k / spp].phone) * spp +
                  static_cast<int>(k % spp);
      for (std::size_t t = k * frames / states; t < (k + 1) * frames / states; t++) {
        assigned[state].AppendRow(u.feats->Row(t));
        all.AppendRow(u.feats->Row(t));
      }
    }
  }
  if (all.NumRows() == 0)
    throw DataError("flat start for '" + ps.lang().code + "': no feasible utterances");

  GmmEmOptions gopts;
  gopts.iters = opts.init_gmm_iters;
  gopts.var_floor = opts.var_floor;
  gopts.reinit_starved = false;
  gopts.num_comp = 1;
  gopts.seed = opts.seed;
  DiagGmm fallback = EmFitGmm({&all}, gopts).gmm;

  res.hmms.phoneset = ps;
  res.hmms.emissions.resize(block);
  res.hmms.log_self.resize(block);
  res.hmms.log_next.resize(block);
  std::vector<DiagGmm> fitted(block);
  ParallelFor(block, opts.num_jobs, [&](std::size_t s) {
    if (assigned[s].NumRows() == 0) {
      fitted[s] = fallback;
      return;
    }
    GmmEmOptions o = gopts;
    o.num_comp = static_cast<int>(
        std::min<std::size_t>(opts.num_gauss, assigned[s].NumRows()));
    o.seed = SubSeed(opts.seed, s, 0x6673);
    fitted[s] = EmFitGmm({&assigned[s]}, o).gmm;
  });
  for (int s = 0; s < block; s++) {
    if (assigned[s].NumRows() == 0)
      Log().warn("flat start: state {} of '{}' has no frames; using the global GMM", s,
                 ps.lang().code);
    res.hmms.emissions[s] = std::move(fitted[s]);
    SetTransitions(&res.hmms, s, opts.init_self_loop, opts.trans_floor);
  }
  return res;
}

AlignResult ViterbiAlign(const MonoHmmSet &hmms, const Matrix &feats,
                         const UtteranceRecord &record) {
  return AlignGraph(Compose({&hmms}, nullptr, record), feats, record.utt_id);
}

AlignResult ViterbiAlignMixed(const std::vector<const MonoHmmSet *> &sets,
                              const LanguageInventory &inventory, const Matrix &feats,
                              const UtteranceRecord &record) {
  return AlignGraph(Compose(sets, &inventory, record), feats, record.utt_id);
}

MonophoneResult TrainMonophone(const std::vector<AlignInput> &utts, const PhoneSet &ps,
                               int iters, const MonoHmmOptions &opts) {
  if (iters < 0) throw ConfigError("monophone iterations must be >= 0");
  FlatStartResult flat = FlatStart(utts, ps, opts);
  MonophoneResult res;
  res.hmms = std::move(flat.hmms);
  res.skipped = flat.skipped;
  std::vector<const AlignInput *> usable;
  for (const auto &u : utts)
    if (std::find(res.skipped.begin(), res.skipped.end(), u.record->utt_id) ==
        res.skipped.end())
      usable.push_back(&u);

  const int block = ps.BlockSize();
  for (int it = 0; it <= iters; it++) {
    std::vector<AlignResult> aligned(usable.size());
    ParallelFor(usable.size(), opts.num_jobs, [&](std::size_t i) {
      aligned[i] = ViterbiAlign(res.hmms, *usable[i]->feats, *usable[i]->record);
    });
    double total = 0.0;
    for (const auto &a : aligned) total += a.loglik;
    res.loglik.push_back(total);
    if (it == iters) break;

    std::vector<double> self_count(block, 0.0), next_count(block, 0.0);
    std::vector<Matrix> frames(block);
    for (std::size_t i = 0; i < usable.size(); i++) {
      const auto &st = aligned[i].alignment.frame_state;
      const auto &path = aligned[i].path;
      for (std::size_t t = 0; t < st.size(); t++) {
        frames[st[t]].AppendRow(usable[i]->feats->Row(t));
        if (t + 1 == st.size()) continue;
        if (path[t + 1] == path[t])
          self_count[st[t]] += 1.0;
        else
          next_count[st[t]] += 1.0;
      }
    }
    std::vector<DiagGmm> updated(block);
    ParallelFor(block, opts.num_jobs, [&](std::size_t s) {
      if (frames[s].NumRows() == 0) {
        updated[s] = res.hmms.emissions[s];
        return;
      }
      GmmEmOptions o;
      o.iters = 1;
      o.var_floor = opts.var_floor;
      o.reinit_starved = false;
      updated[s] = EmUpdateGmm(res.hmms.emissions[s], {&frames[s]}, o).gmm;
    });
    for (int s = 0; s < block; s++) {
      res.hmms.emissions[s] = std::move(updated[s]);
      double n = self_count[s] + next_count[s];
      if (n > 0.0) SetTransitions(&res.hmms, s, self_count[s] / n, opts.trans_floor);
    }
  }
  return res;
}

std::vector<int> AlignmentToTargets(const AlignmentMatrix &alignment, int lang,
                                    int block_size) {
  std::vector<int> out(alignment.NumFrames(), -1);
  for (std::size_t t = 0; t < out.size(); t++) {
    int frame_lang = alignment.frame_lang.empty()
                         ? alignment.lang
                         : static_cast<int>(alignment.frame_lang[t]);
    if (frame_lang != lang) continue;
    if (alignment.frame_state[t] >= static_cast<std::uint32_t>(block_size))
      throw InternalError(alignment.utt_id + ": state " +
                          std::to_string(alignment.frame_state[t]) +
                          " outside block of size " + std::to_string(block_size));
    out[t] = static_cast<int>(alignment.frame_state[t]);
  }
  return out;
}

}  // namespace mbnf
