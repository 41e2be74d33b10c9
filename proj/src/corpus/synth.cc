// src/corpus/synth.cc

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

#include "mbnf/corpus/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"

namespace mbnf {

LanguageInventory SynthConfig::Inventory() const {
  std::vector<std::string> codes;
  for (const auto &l : languages) codes.push_back(l.phoneset.lang().code);
  return LanguageInventory(codes);
}

int SynthConfig::TotalUtterances() const {
  int n = num_cs_utterances;
  for (const auto &l : languages) n += l.num_utterances;
  return n;
}

void SynthConfig::Validate(bool waveform) const {
  if (languages.empty()) throw ConfigError("synth: no languages configured");
  Inventory();  // rejects duplicate codes
  if (emission_dim < 1) throw ConfigError("synth: emission_dim must be >= 1");
  if (min_frames_per_state < 1 || max_frames_per_state < min_frames_per_state)
    throw ConfigError("synth: bad frames-per-state range");
  if (!(noise_level >= 0.0)) throw ConfigError("synth: noise_level must be >= 0");
  if (num_cs_utterances < 0) throw ConfigError("synth: negative num_cs_utterances");
  if (num_cs_utterances > 0 && languages.size() < 2)
    throw ConfigError("synth: code-switched utterances need >= 2 languages");
  if (cs_min_segment < 1 || cs_max_segment < cs_min_segment)
    throw ConfigError("synth: bad code-switch segment range");
  for (std::size_t l = 0; l < languages.size(); l++) {
    const SynthLanguage &lang = languages[l];
    const std::string &code = lang.phoneset.lang().code;
    if (lang.phoneset.NumPhones() == 0) throw ConfigError("synth: language with no phones");
    if (lang.phoneset.lang().index != static_cast<int>(l))
      throw ConfigError("synth: language '" + code + "' has index " +
                        std::to_string(lang.phoneset.lang().index) + ", expected " +
                        std::to_string(l));
    if (lang.num_utterances < 0) throw ConfigError("synth: negative num_utterances");
    if (lang.min_phones < 1 || lang.max_phones < lang.min_phones)
      throw ConfigError("synth: bad phone-count range for '" + code + "'");
    std::size_t block = lang.phoneset.BlockSize();
    if (lang.state_means.NumRows() != block ||
        lang.state_means.NumCols() != static_cast<std::size_t>(emission_dim) ||
        lang.state_vars.NumRows() != block ||
        lang.state_vars.NumCols() != static_cast<std::size_t>(emission_dim))
      throw ConfigError("synth: emission parameters of '" + code + "' must be " +
                        std::to_string(block) + "x" + std::to_string(emission_dim));
    if (!lang.state_means.IsFinite())
      throw ConfigError("synth: non-finite emission mean for '" + code + "'");
    for (double v : lang.state_vars.Values())
      if (!(v > 0.0) || !std::isfinite(v))
        throw ConfigError("synth: emission variances of '" + code + "' must be > 0");
    if (waveform) {
      if (lang.tones.size() != static_cast<std::size_t>(lang.phoneset.NumPhones()))
        throw ConfigError("synth: '" + code + "' needs one tone recipe per phone");
      double top = 1.0 + state_freq_step * (lang.phoneset.states_per_phone() - 1);
      for (const auto &t : lang.tones) {
        if (t.freqs_hz.empty() || t.freqs_hz.size() > 3 ||
            t.amps.size() != t.freqs_hz.size())
          throw ConfigError("synth: tone recipes need 1 to 3 (freq, amp) pairs");
        for (double f : t.freqs_hz)
          if (!(f > 0.0) || f * std::max(top, 1.0) >= 0.5 * sample_rate_hz)
            throw ConfigError("synth: tone frequency " + std::to_string(f) +
                              " Hz is not below Nyquist");
      }
    }
  }
  if (waveform) {
    if (sample_rate_hz <= 0 || samples_per_frame <= 0 || edge_pad_samples < 0)
      throw ConfigError("synth: bad waveform geometry");
    if (!(waveform_noise_std >= 0.0))
      throw ConfigError("synth: waveform_noise_std must be >= 0");
  }
  if (TotalUtterances() == 0) throw ConfigError("synth: zero utterances requested");
}

namespace {

struct PlannedPhone {
  int lang;
  int phone;
  std::vector<int> durations;  // frames per state
};

struct UttPlan {
  std::string utt_id;
  std::vector<PlannedPhone> phones;
};

PlannedPhone PlanPhone(const SynthConfig &cfg, int lang, Rng &rng) {
  const PhoneSet &ps = cfg.languages[lang].phoneset;
  PlannedPhone p{lang, rng.UniformInt(0, ps.NumPhones() - 1), {}};
  for (int s = 0; s < ps.states_per_phone(); s++)
    p.durations.push_back(
        rng.UniformInt(cfg.min_frames_per_state, cfg.max_frames_per_state));
  return p;
}

std::string MakeId(const std::string &prefix, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "-%04d", n);
  return prefix + buf;
}

std::vector<UttPlan> PlanCorpus(const SynthConfig &cfg) {
  std::vector<UttPlan> plans;
  std::uint64_t u = 0;
  for (std::size_t l = 0; l < cfg.languages.size(); l++) {
    const SynthLanguage &lang = cfg.languages[l];
    for (int n = 0; n < lang.num_utterances; n++, u++) {
      Rng rng(SubSeed(cfg.seed, u, 1));
      UttPlan plan{MakeId(lang.phoneset.lang().code, n), {}};
      int len = rng.UniformInt(lang.min_phones, lang.max_phones);
      for (int i = 0; i < len; i++)
        plan.phones.push_back(PlanPhone(cfg, static_cast<int>(l), rng));
      plans.push_back(std::move(plan));
    }
  }
  const SynthLanguage &matrix = cfg.languages[0];
  for (int n = 0; n < cfg.num_cs_utterances; n++, u++) {
    Rng rng(SubSeed(cfg.seed, u, 1));
    UttPlan plan{MakeId("cs", n), {}};
    int partner = rng.UniformInt(1, static_cast<int>(cfg.languages.size()) - 1);
    int len = std::max(2, rng.UniformInt(matrix.min_phones, matrix.max_phones));
    int lang = rng.UniformInt(0, 1) == 0 ? 0 : partner;
    int placed = 0;
    while (placed < len) {
      int seg = rng.UniformInt(cfg.cs_min_segment, cfg.cs_max_segment);
      // The first stretch leaves room for at least one switch.
      seg = std::min(seg, len - placed - (placed == 0 ? 1 : 0));
      for (int i = 0; i < seg; i++) plan.phones.push_back(PlanPhone(cfg, lang, rng));
      placed += seg;
      lang = lang == 0 ? partner : 0;
    }
    plans.push_back(std::move(plan));
  }
  return plans;
}

void FillRecordAndGold(const SynthConfig &cfg, const UttPlan &plan,
                       UtteranceRecord *rec, AlignmentMatrix *gold) {
  rec->utt_id = plan.utt_id;
  gold->utt_id = plan.utt_id;
  gold->lang = plan.phones.front().lang;
  for (const auto &p : plan.phones) {
    const PhoneSet &ps = cfg.languages[p.lang].phoneset;
    const std::string &sym = ps.phones()[p.phone];
    const std::string &code = ps.lang().code;
    rec->tokens.push_back(Token{sym, code});
    rec->phones.push_back(PhoneToken{sym, code});
    if (p.lang != gold->lang) gold->lang = -1;
    for (int s = 0; s < ps.states_per_phone(); s++) {
      std::uint32_t state = p.phone * ps.states_per_phone() + s;
      for (int d = 0; d < p.durations[s]; d++) {
        gold->frame_lang.push_back(p.lang);
        gold->frame_state.push_back(state);
      }
    }
  }
}

}  // namespace

std::vector<SynthUtterance> SynthCorpus(const SynthConfig &cfg) {
  cfg.Validate(false);
  std::vector<UttPlan> plans = PlanCorpus(cfg);
  std::vector<SynthUtterance> out(plans.size());
  for (std::size_t u = 0; u < plans.size(); u++) {
    SynthUtterance &utt = out[u];
    FillRecordAndGold(cfg, plans[u], &utt.record, &utt.gold);
    Rng rng(SubSeed(cfg.seed, u, 2));
    std::size_t frames = utt.gold.NumFrames();
    utt.emissions.Resize(frames, cfg.emission_dim);
    for (std::size_t t = 0; t < frames; t++) {
      const SynthLanguage &lang = cfg.languages[utt.gold.frame_lang[t]];
      std::uint32_t s = utt.gold.frame_state[t];
      for (int d = 0; d < cfg.emission_dim; d++) {
        double z = rng.Gauss();
        utt.emissions(t, d) = lang.state_means(s, d) +
                              cfg.noise_level * std::sqrt(lang.state_vars(s, d)) * z;
      }
    }
  }
  return out;
}

AudioSegment RenderTones(const std::vector<ToneRecipe> &recipes,
                         const std::vector<std::size_t> &num_samples,
                         int sample_rate_hz, double noise_std, std::uint64_t seed,
                         std::vector<std::pair<std::size_t, std::size_t>> *bounds) {
  if (recipes.size() != num_samples.size())
    throw ConfigError("RenderTones: recipe and length counts differ");
  if (sample_rate_hz <= 0) throw ConfigError("RenderTones: bad sample rate");
  double nyquist = 0.5 * sample_rate_hz;
  AudioSegment audio;
  audio.sample_rate_hz = sample_rate_hz;
  if (bounds) bounds->clear();
  Rng rng(seed);
  for (std::size_t k = 0; k < recipes.size(); k++) {
    const ToneRecipe &r = recipes[k];
    if (r.amps.size() != r.freqs_hz.size())
      throw ConfigError("RenderTones: frequency and amplitude counts differ");
    for (double f : r.freqs_hz)
      if (f >= nyquist || f < 0.0)
        throw ConfigError("RenderTones: frequency " + std::to_string(f) +
                          " Hz is not below Nyquist " + std::to_string(nyquist));
    std::size_t start = audio.samples.size();
    for (std::size_t n = 0; n < num_samples[k]; n++) {
      double x = 0.0;
      for (std::size_t i = 0; i < r.freqs_hz.size(); i++)
        x += r.amps[i] * std::sin(2.0 * std::numbers::pi * r.freqs_hz[i] *
                                  static_cast<double>(n) / sample_rate_hz);
      if (noise_std > 0.0) x += noise_std * rng.Gauss();
      audio.samples.push_back(std::clamp(x, -1.0, 1.0));
    }
    if (bounds) bounds->emplace_back(start, audio.samples.size());
  }
  return audio;
}

std::vector<SynthWaveform> SynthWaveforms(const SynthConfig &cfg) {
  cfg.Validate(true);
  std::vector<UttPlan> plans = PlanCorpus(cfg);
  std::vector<SynthWaveform> out(plans.size());
  for (std::size_t u = 0; u < plans.size(); u++) {
    SynthWaveform &w = out[u];
    FillRecordAndGold(cfg, plans[u], &w.record, &w.gold);
    std::vector<ToneRecipe> recipes;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> owner;  // phone position of each state segment
    for (std::size_t i = 0; i < plans[u].phones.size(); i++) {
      const PlannedPhone &p = plans[u].phones[i];
      const ToneRecipe &base = cfg.languages[p.lang].tones[p.phone];
      for (std::size_t s = 0; s < p.durations.size(); s++) {
        ToneRecipe r = base;
        for (double &f : r.freqs_hz) f *= 1.0 + cfg.state_freq_step * s;
        recipes.push_back(std::move(r));
        lengths.push_back(static_cast<std::size_t>(p.durations[s]) *
                          cfg.samples_per_frame);
        owner.push_back(i);
      }
    }
    lengths.front() += cfg.edge_pad_samples;
    lengths.back() += cfg.edge_pad_samples;
    std::vector<std::pair<std::size_t, std::size_t>> bounds;
    w.audio = RenderTones(recipes, lengths, cfg.sample_rate_hz, cfg.waveform_noise_std,
                          SubSeed(cfg.seed, u, 3), &bounds);
    w.audio.utt_id = w.record.utt_id;
    for (std::size_t k = 0; k < bounds.size(); k++) {
      if (w.segments.empty() || w.segments.back().phone_position != owner[k])
        w.segments.push_back(PhoneSegment{owner[k], bounds[k].first, bounds[k].second});
      else
        w.segments.back().end_sample = bounds[k].second;
    }
  }
  return out;
}

SynthConfig MakeSynthConfig(const SynthPreset &preset) {
  if (preset.languages.empty()) throw ConfigError("synth preset: no languages");
  if (preset.phones_per_language < 1 || preset.states_per_phone < 1)
    throw ConfigError("synth preset: zero phones or states");
  if (preset.emission_dim < 1 || preset.emission_dim > 30)
    throw ConfigError("synth preset: emission_dim must be in [1, 30]");
  std::size_t block =
      static_cast<std::size_t>(preset.phones_per_language) * preset.states_per_phone;
  std::size_t corners = std::size_t{1} << preset.emission_dim;
  if (block > corners)
    throw ConfigError("synth preset: " + std::to_string(block) +
                      " states do not fit on the corners of a " +
                      std::to_string(preset.emission_dim) + "-cube");
  SynthConfig cfg;
  cfg.emission_dim = preset.emission_dim;
  cfg.min_frames_per_state = preset.min_frames_per_state;
  cfg.max_frames_per_state = preset.max_frames_per_state;
  cfg.noise_level = preset.noise_level;
  cfg.num_cs_utterances = preset.num_cs_utterances;
  cfg.waveform_noise_std = preset.waveform_noise_std;
  cfg.state_freq_step = preset.state_freq_step;
  cfg.edge_pad_samples = preset.edge_pad_samples;
  cfg.seed = preset.seed;
  for (std::size_t l = 0; l < preset.languages.size(); l++) {
    const std::string &code = preset.languages[l];
    std::vector<std::string> symbols;
    for (int p = 0; p < preset.phones_per_language; p++) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "_p%02d", p);
      symbols.push_back(code + buf);
    }
    Rng rng(SubSeed(preset.seed, HashName(code), 17));
    SynthLanguage lang;
    lang.phoneset = PhoneSet(LanguageId{code, static_cast<int>(l)}, symbols,
                             preset.states_per_phone);
    lang.num_utterances = preset.utterances_per_language;
    lang.min_phones = preset.min_phones;
    lang.max_phones = preset.max_phones;
    // Distinct cube corners, drawn by a partial Fisher-Yates shuffle.
    std::vector<std::uint64_t> pattern(std::min<std::size_t>(corners, 4096));
    for (std::size_t i = 0; i < pattern.size(); i++)
      pattern[i] = corners <= 4096 ? i : (rng.engine()() & (corners - 1));
    if (corners > 4096) {
      std::sort(pattern.begin(), pattern.end());
      pattern.erase(std::unique(pattern.begin(), pattern.end()), pattern.end());
    }
    lang.state_means.Resize(block, preset.emission_dim);
    lang.state_vars.Resize(block, preset.emission_dim, 1.0);
    for (std::size_t s = 0; s < block; s++) {
      std::size_t j = s + static_cast<std::size_t>(rng.UniformInt(
                              0, static_cast<int>(pattern.size() - 1 - s)));
      std::swap(pattern[s], pattern[j]);
      for (int d = 0; d < preset.emission_dim; d++)
        lang.state_means(s, d) =
            ((pattern[s] >> d) & 1) ? preset.separation : -preset.separation;
    }
    for (int p = 0; p < preset.phones_per_language; p++) {
      ToneRecipe r;
      r.freqs_hz.push_back(rng.Uniform(preset.f0_min_hz, preset.f0_max_hz));
      r.amps.push_back(rng.Uniform(0.25, 0.4));
      int extra = rng.UniformInt(0, 2);
      for (int k = 0; k < extra; k++) {
        r.freqs_hz.push_back(rng.Uniform(preset.tone_min_hz, preset.tone_max_hz));
        r.amps.push_back(rng.Uniform(0.1, 0.25));
      }
      lang.tones.push_back(std::move(r));
    }
    cfg.languages.push_back(std::move(lang));
  }
  return cfg;
}

SynthConfig ReferenceSeparableConfig(std::uint64_t seed) {
  SynthPreset preset;
  preset.languages = {"eng", "zul"};
  preset.phones_per_language = 5;
  preset.states_per_phone = 3;
  preset.utterances_per_language = 30;
  preset.emission_dim = 6;
  preset.separation = 5.0;
  preset.noise_level = 1.0;
  preset.seed = seed;
  return MakeSynthConfig(preset);
}

}  // namespace mbnf
