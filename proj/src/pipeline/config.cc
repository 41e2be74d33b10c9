// src/pipeline/config.cc

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

#include "mbnf/pipeline/config.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"

namespace mbnf {
namespace {

struct Binding {
  std::string key;
  std::function<void(PipelineConfig &, const std::string &)> set;
  std::function<std::string(const PipelineConfig &)> get;
};

template <typename T>
T ParseNumber(const std::string &key, const std::string &text) {
  T v{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ConfigError("config " + key + ": cannot parse '" + text + "'");
  return v;
}

template <typename T>
std::string Format(T v) {
  if constexpr (std::is_floating_point_v<T>)
    return fmt::format("{}", v);
  else
    return std::to_string(v);
}

template <typename T>
Binding Num(std::string key, T PipelineConfig::*field) {
  return {key, [key, field](PipelineConfig &c, const std::string &v) {
            c.*field = ParseNumber<T>(key, v);
          },
          [field](const PipelineConfig &c) { return Format(c.*field); }};
}

template <typename S, typename T>
Binding Sub(std::string key, S PipelineConfig::*outer, T S::*field) {
  return {key, [key, outer, field](PipelineConfig &c, const std::string &v) {
            c.*outer.*field = ParseNumber<T>(key, v);
          },
          [outer, field](const PipelineConfig &c) { return Format(c.*outer.*field); }};
}

std::vector<std::string> SplitList(const std::string &s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    auto b = item.find_first_not_of(" \t"), e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

const std::vector<Binding> &Bindings() {
  static const std::vector<Binding> kBindings = [] {
    using C = PipelineConfig;
    std::vector<Binding> b;
    b.push_back({"run.preset", [](C &c, const std::string &v) { c.preset = v; },
                 [](const C &c) { return c.preset; }});
    b.push_back(Num("run.seed", &C::seed));
    b.push_back(Num("run.jobs", &C::jobs));
    b.push_back({"corpus.manifest", [](C &c, const std::string &v) { c.manifest = v; },
                 [](const C &c) { return c.manifest; }});
    b.push_back({"corpus.languages",
                 [](C &c, const std::string &v) { c.synth.languages = SplitList(v); },
                 [](const C &c) {
                   std::string s;
                   for (const auto &l : c.synth.languages) s += (s.empty() ? "" : ",") + l;
                   return s;
                 }});
    b.push_back(Sub("corpus.phones_per_language", &C::synth, &SynthPreset::phones_per_language));
    b.push_back(Sub("corpus.states_per_phone", &C::synth, &SynthPreset::states_per_phone));
    b.push_back(Sub("corpus.utterances_per_language", &C::synth,
                    &SynthPreset::utterances_per_language));
    b.push_back(Sub("corpus.cs_utterances", &C::synth, &SynthPreset::num_cs_utterances));
    b.push_back(Sub("corpus.min_phones", &C::synth, &SynthPreset::min_phones));
    b.push_back(Sub("corpus.max_phones", &C::synth, &SynthPreset::max_phones));
    b.push_back(Sub("corpus.min_frames_per_state", &C::synth, &SynthPreset::min_frames_per_state));
    b.push_back(Sub("corpus.max_frames_per_state", &C::synth, &SynthPreset::max_frames_per_state));
    b.push_back(Sub("corpus.waveform_noise_std", &C::synth, &SynthPreset::waveform_noise_std));
    b.push_back(Sub("corpus.state_freq_step", &C::synth, &SynthPreset::state_freq_step));
    b.push_back(Num("corpus.test_every", &C::test_every));
    b.push_back(Num("ubm.components", &C::ubm_components));
    b.push_back(Num("ubm.iters", &C::ubm_iters));
    b.push_back(Num("ivector.dim", &C::ivector_dim));
    b.push_back(Num("ivector.iters", &C::ivector_iters));
    b.push_back(Num("align.gauss_per_state", &C::align_gauss));
    b.push_back(Num("align.iters", &C::align_iters));
    b.push_back(Num("net.hidden_dim", &C::hidden_dim));
    b.push_back(Num("net.num_hidden", &C::num_hidden));
    b.push_back(Num("net.bottleneck_dim", &C::bottleneck_dim));
    b.push_back(Sub("net.epochs", &C::schedule, &TrainSchedule::epochs));
    b.push_back(Sub("net.minibatch_frames", &C::schedule, &TrainSchedule::minibatch_frames));
    b.push_back(Sub("net.chunk_width", &C::schedule, &TrainSchedule::chunk_width));
    b.push_back(Sub("net.learning_rate", &C::schedule, &TrainSchedule::learning_rate));
    b.push_back(Sub("net.lr_decay", &C::schedule, &TrainSchedule::lr_decay));
    b.push_back({"net.sampling",
                 [](C &c, const std::string &v) {
                   if (v == "proportional")
                     c.schedule.policy = SamplingPolicy::kProportional;
                   else if (v == "uniform")
                     c.schedule.policy = SamplingPolicy::kUniform;
                   else
                     throw ConfigError("config net.sampling: expected proportional or uniform, got '" +
                                       v + "'");
                 },
                 [](const C &c) {
                   return std::string(c.schedule.policy == SamplingPolicy::kUniform ? "uniform"
                                                                                    : "proportional");
                 }});
    b.push_back(Sub("probe.epochs", &C::probe, &ProbeOptions::epochs));
    b.push_back(Sub("probe.minibatch_frames", &C::probe, &ProbeOptions::minibatch_frames));
    b.push_back(Sub("probe.learning_rate", &C::probe, &ProbeOptions::learning_rate));
    b.push_back(Sub("probe.lr_decay", &C::probe, &ProbeOptions::lr_decay));
    b.push_back(Num("probe.decode_min_run", &C::decode_min_run));
    return b;
  }();
  return kBindings;
}

const Binding &Find(const std::string &key) {
  for (const auto &b : Bindings())
    if (b.key == key) return b;
  throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

PipelineConfig PipelineConfig::Preset(const std::string &name) {
  PipelineConfig c;
  c.preset = name;
  c.synth.languages = {"eng", "zul", "xho"};
  c.synth.utterances_per_language = 30;
  c.synth.num_cs_utterances = 10;
  if (name == "desk") {
    c.hidden_dim = 64;
    c.num_hidden = 3;
    c.ivector_dim = 10;
    c.bottleneck_dim = 8;
  } else if (name == "paper") {
    c.hidden_dim = 1024;
    c.num_hidden = 6;
    c.ivector_dim = 100;
    c.bottleneck_dim = 39;
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
  }
  c.schedule.epochs = 10;
  return c;
}

void PipelineConfig::Set(const std::string &key, const std::string &value) {
  Find(key).set(*this, value);
}

std::string PipelineConfig::Get(const std::string &key) const { return Find(key).get(*this); }

std::vector<std::string> PipelineConfig::Keys() {
  std::vector<std::string> out;
  for (const auto &b : Bindings()) out.push_back(b.key);
  return out;
}

PipelineConfig PipelineConfig::FromIni(const std::string &text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  PipelineConfig c = Preset(tree.get<std::string>("run.preset", "desk"));
  for (const auto &[section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ParseError("config: key '" + section + "' outside any section");
    for (const auto &[key, value] : body) c.Set(section + "." + key, value.data());
  }
  c.Validate();
  return c;
}

PipelineConfig PipelineConfig::LoadFile(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return FromIni(ss.str());
}

std::string PipelineConfig::ToIni() const {
  std::string out, section;
  for (const auto &b : Bindings()) {
    std::string s = b.key.substr(0, b.key.find('.'));
    if (s != section) {
      out += (section.empty() ? "" : "\n") + fmt::format("[{}]\n", s);
      section = s;
    }
    out += fmt::format("{} = {}\n", b.key.substr(s.size() + 1), b.get(*this));
  }
  return out;
}

void PipelineConfig::PropagateSeed() {
  synth.seed = seed;
  schedule.seed = SubSeed(seed, 0x6e6e);
  probe.seed = SubSeed(seed, 0x7072);
}

void PipelineConfig::Validate() const {
  if (jobs < 1) throw ConfigError("run.jobs must be >= 1");
  if (test_every < 2) throw ConfigError("corpus.test_every must be >= 2");
  if (manifest.empty()) {
    if (synth.languages.size() < 2) throw ConfigError("corpus.languages needs >= 2 languages");
    if (synth.utterances_per_language < 1)
      throw ConfigError("corpus.utterances_per_language must be >= 1");
  }
  if (ubm_components < 1 || ubm_iters < 0) throw ConfigError("ubm settings out of range");
  if (ivector_dim < 1 || ivector_iters < 0) throw ConfigError("ivector settings out of range");
  if (align_gauss < 1 || align_iters < 0) throw ConfigError("align settings out of range");
  if (hidden_dim < 1 || num_hidden < 1 || bottleneck_dim < 1)
    throw ConfigError("net dimensions must be >= 1");
  if (schedule.epochs < 0 || !(schedule.learning_rate > 0.0))
    throw ConfigError("net.epochs must be >= 0 and net.learning_rate > 0");
  if (probe.epochs < 0 || !(probe.learning_rate > 0.0))
    throw ConfigError("probe.epochs must be >= 0 and probe.learning_rate > 0");
  if (decode_min_run < 1) throw ConfigError("probe.decode_min_run must be >= 1");
}

}  // namespace mbnf
