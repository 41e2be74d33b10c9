// include/mbnf/pipeline/config.h

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

#ifndef MBNF_PIPELINE_CONFIG_H_
#define MBNF_PIPELINE_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "mbnf/corpus/synth.h"
#include "mbnf/nnet/nnet-train.h"
#include "mbnf/nnet/probe.h"

namespace mbnf {

// Fully resolved settings of a pipeline run. Text form is INI ("[section]"
// headers, "key = value" lines); every key is listed in ToIni() output.
struct PipelineConfig {
  std::string preset = "desk";
  std::uint64_t seed = 7;
  int jobs = 1;

  // Corpus: an external manifest, or a synthetic corpus when empty.
  std::string manifest;
  SynthPreset synth;
  // Utterance i (manifest order) is held out for testing when i % test_every
  // == test_every - 1.
  int test_every = 5;

  int ubm_components = 16;
  int ubm_iters = 5;
  int ivector_dim = 10;
  int ivector_iters = 5;

  int align_gauss = 2;
  int align_iters = 5;

  int hidden_dim = 64;
  int num_hidden = 3;
  int bottleneck_dim = 8;
  TrainSchedule schedule;

  ProbeOptions probe;
  // Hypothesis decoding drops runs of fewer frames than this.
  int decode_min_run = 3;

  // "desk": 64 x 3 hidden, i-vector 10, bottleneck 8.
  // "paper": 1024 x 6 hidden, i-vector 100, bottleneck 39.
  static PipelineConfig Preset(const std::string &name);

  // Sets one "section.key" from text; ConfigError for unknown keys or bad
  // values.
  void Set(const std::string &key, const std::string &value);
  std::string Get(const std::string &key) const;
  static std::vector<std::string> Keys();

  // Reads an INI file over the preset named in its [run] section (desk when
  // absent).
  static PipelineConfig LoadFile(const std::string &path);
  static PipelineConfig FromIni(const std::string &text);
  std::string ToIni() const;

  // Seeds of every stage follow the master seed.
  void PropagateSeed();
  void Validate() const;
};

}  // namespace mbnf

#endif  // MBNF_PIPELINE_CONFIG_H_
