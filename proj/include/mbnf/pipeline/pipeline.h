// include/mbnf/pipeline/pipeline.h

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

#ifndef MBNF_PIPELINE_PIPELINE_H_
#define MBNF_PIPELINE_PIPELINE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mbnf/corpus/corpus.h"
#include "mbnf/dsp/feature-matrix.h"
#include "mbnf/pipeline/config.h"

namespace mbnf {

enum class Stage {
  kSynth,
  kExtract,
  kUbm,
  kIvector,
  kAlign,
  kMbnfTrain,
  kMbnfExtract,
  kCombine,
  kProbe,
  kScore,
};

std::string_view StageName(Stage stage);
std::optional<Stage> ParseStage(std::string_view name);
const std::vector<Stage> &AllStages();

// Probe feature sets compared in the summary.
inline constexpr const char *kBaselineSet = "mfcc-only";
inline constexpr const char *kCombinedSet = "combined";

// A run directory holds the resolved config (config.ini), one set of output
// files per stage, per-stage stamps (stamps/<stage>.json) and, after a full
// run, summary.json. Only one process may use a run directory at a time.
class Pipeline {
 public:
  Pipeline(PipelineConfig config, std::string run_dir);
  ~Pipeline();

  const PipelineConfig &config() const { return config_; }
  const std::string &run_dir() const { return run_dir_; }

  std::vector<std::string> Outputs(Stage stage) const;
  std::vector<std::string> Inputs(Stage stage) const;

  // Runs a single stage. Existing outputs are a WouldOverwriteError unless
  // force is set; missing inputs are a DataError.
  void RunStage(Stage stage, bool force);

  // Runs every stage in order, skipping stages whose stamp still matches the
  // config, inputs and outputs. Writes and returns summary.json.
  nlohmann::ordered_json RunAll(bool force);

  // Restricts the extract stage to a subset of {mfcc13dd, mfcc40, pitch3}.
  void SetExtractKinds(std::vector<FeatureKind> kinds) { extract_kinds_ = std::move(kinds); }

  // Stage names run (not skipped) by the last RunAll.
  const std::vector<std::string> &executed() const { return executed_; }

  // Standalone scoring of a hypothesis file against a manifest.
  static nlohmann::ordered_json ScoreFiles(const std::string &manifest, const std::string &hyps);

 private:
  struct Corpus;
  std::string Path(const std::string &name) const;
  void CheckConfig(bool force);
  void Execute(Stage stage);
  bool UpToDate(Stage stage) const;
  void WriteStamp(Stage stage, double seconds);
  const Corpus &LoadCorpus();

  void RunSynth();
  void RunExtract();
  void RunUbm();
  void RunIvector();
  void RunAlign();
  void RunMbnfTrain();
  void RunMbnfExtract();
  void RunCombine();
  void RunProbe();
  void RunScore();

  PipelineConfig config_;
  std::string run_dir_;
  int lock_fd_ = -1;
  std::vector<FeatureKind> extract_kinds_;
  std::unique_ptr<Corpus> corpus_;
  std::map<std::string, double> stage_seconds_;
  std::vector<std::string> executed_;
};

}  // namespace mbnf

#endif  // MBNF_PIPELINE_PIPELINE_H_
