// tools/mbnf.cc

// Copyright 2026  The mbnf Authors

// See ../LICENSE for clarification regarding multiple authors
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

// mbnf: command-line front-end of the bottleneck-feature pipeline.
//
// Every stage subcommand works on a run directory (--out). The resolved
// config is written to <out>/config.ini; later stages reuse it unless
// --config or --set give something else.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"
#include "mbnf/pipeline/pipeline.h"

namespace {

struct GlobalFlags {
  std::string config;
  std::string out = "mbnf-run";
  std::string preset;
  std::vector<std::string> sets;
  long long seed = -1;
  int jobs = 0;
  bool force = false;
  int verbose = 0;
};

mbnf::PipelineConfig ResolveConfig(const GlobalFlags &g) {
  namespace fs = std::filesystem;
  mbnf::PipelineConfig c;
  const std::string existing = (fs::path(g.out) / "config.ini").string();
  if (!g.config.empty()) {
    c = mbnf::PipelineConfig::LoadFile(g.config);
    if (!g.preset.empty() && g.preset != c.preset)
      throw mbnf::UsageError("--preset " + g.preset + " conflicts with run.preset = " +
                             c.preset + " in " + g.config);
  } else if (g.preset.empty() && fs::exists(existing)) {
    c = mbnf::PipelineConfig::LoadFile(existing);
  } else {
    c = mbnf::PipelineConfig::Preset(g.preset.empty() ? "desk" : g.preset);
  }
  for (const auto &kv : g.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw mbnf::UsageError("--set expects key=value, got '" + kv + "'");
    c.Set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed >= 0) c.seed = static_cast<std::uint64_t>(g.seed);
  if (g.jobs > 0) c.jobs = g.jobs;
  c.Validate();
  return c;
}

void PrintSummary(const nlohmann::ordered_json &s) {
  std::cout << "stage            seconds  status\n";
  for (const auto &[name, st] : s["stages"].items())
    std::cout << fmt::format("{:<16} {:>7.2f}  {}\n", name, st["seconds"].get<double>(),
                             st["skipped"].get<bool>() ? "up to date" : "ran");
  const auto &ac = s["ac7"];
  std::cout << fmt::format("\nheld-out frame accuracy\n  {:<10} {:.4f}\n  {:<10} {:.4f}\n  {:<10} {:+.4f}\n",
                           mbnf::kBaselineSet, ac[mbnf::kBaselineSet].get<double>(),
                           mbnf::kCombinedSet, ac[mbnf::kCombinedSet].get<double>(),
                           "delta", ac["improvement"].get<double>());
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multilingual bottleneck-feature toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalFlags g;
  app.add_option("--config", g.config, "INI config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Run directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--jobs", g.jobs, "Worker threads");
  app.add_option("--preset", g.preset, "Base preset when no config file is given")
      ->check(CLI::IsMember({"desk", "paper"}));
  app.add_option("--set", g.sets, "Override one config key: section.key=value");
  app.add_flag("--force", g.force, "Overwrite existing outputs");
  app.add_flag("-v,--verbose", g.verbose, "More logging (repeatable)");

  std::map<CLI::App *, mbnf::Stage> stage_cmds;
  for (mbnf::Stage s : mbnf::AllStages())
    stage_cmds[app.add_subcommand(std::string(mbnf::StageName(s)), "Run the " +
                                  std::string(mbnf::StageName(s)) + " stage")] = s;
  CLI::App *extract = app.get_subcommand("extract");
  std::vector<std::string> kinds;
  extract->add_option("--features", kinds, "Subset of mfcc13dd, mfcc40, pitch3")
      ->delimiter(',')
      ->check(CLI::IsMember({"mfcc13dd", "mfcc40", "pitch3"}));

  CLI::App *score = app.get_subcommand("score");
  std::string score_manifest, score_hyps, score_json;
  score->add_option("--manifest", score_manifest, "Reference manifest (standalone scoring)");
  score->add_option("--hyps", score_hyps, "Hypothesis file: utt_id<TAB>words");
  score->add_option("--json", score_json, "Write the report here as JSON");

  CLI::App *pipeline = app.add_subcommand("pipeline", "Run all stages, skipping up-to-date ones");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(mbnf::ExitCode::kUsage);
  }

  try {
    mbnf::SetVerbosity(g.verbose);
    if (score->parsed() && (!score_manifest.empty() || !score_hyps.empty())) {
      if (score_manifest.empty() || score_hyps.empty())
        throw mbnf::UsageError("standalone scoring needs both --manifest and --hyps");
      auto report = mbnf::Pipeline::ScoreFiles(score_manifest, score_hyps);
      if (!score_json.empty()) {
        std::ofstream out(score_json);
        out << report.dump(2) << "\n";
      }
      return 0;
    }
    mbnf::Pipeline p(ResolveConfig(g), g.out);
    if (pipeline->parsed()) {
      PrintSummary(p.RunAll(g.force));
      return 0;
    }
    for (const auto &[cmd, stage] : stage_cmds) {
      if (!cmd->parsed()) continue;
      if (stage == mbnf::Stage::kExtract && !kinds.empty()) {
        std::vector<mbnf::FeatureKind> ks;
        for (const auto &k : kinds) ks.push_back(*mbnf::ParseFeatureKind(k));
        p.SetExtractKinds(ks);
      }
      p.RunStage(stage, g.force);
    }
    return 0;
  } catch (const mbnf::Error &e) {
    mbnf::Log().error("{}", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception &e) {
    mbnf::Log().error("internal error: {}", e.what());
    return static_cast<int>(mbnf::ExitCode::kInternal);
  }
}
