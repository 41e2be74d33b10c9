// tests/pipeline-test.cc

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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "mbnf/base/error.h"
#include "mbnf/dsp/audio.h"
#include "mbnf/io/archive.h"
#include "mbnf/io/records.h"
#include "mbnf/pipeline/pipeline.h"

namespace mbnf {
namespace {

namespace fs = std::filesystem;

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mbnf-pipe-" + std::to_string(getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string Path(const std::string &name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

// Small enough for a full run in about a second.
PipelineConfig SmallConfig() {
  PipelineConfig c = PipelineConfig::Preset("desk");
  c.synth.utterances_per_language = 8;
  c.synth.num_cs_utterances = 2;
  c.ubm_components = 4;
  c.ubm_iters = 2;
  c.ivector_dim = 4;
  c.ivector_iters = 2;
  c.align_iters = 2;
  c.hidden_dim = 16;
  c.num_hidden = 2;
  c.schedule.epochs = 2;
  c.probe.epochs = 2;
  return c;
}

std::size_t CountLines(const std::string &path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += !line.empty();
  return n;
}

TEST(PipelineConfigTest, IniRoundTrip) {
  PipelineConfig c = PipelineConfig::Preset("desk");
  c.Set("run.seed", "123");
  c.Set("corpus.languages", "aa, bb");
  c.Set("net.sampling", "uniform");
  c.Set("net.learning_rate", "0.005");
  PipelineConfig back = PipelineConfig::FromIni(c.ToIni());
  EXPECT_EQ(back.ToIni(), c.ToIni());
  EXPECT_EQ(back.seed, 123u);
  EXPECT_EQ(back.synth.languages, (std::vector<std::string>{"aa", "bb"}));
  EXPECT_EQ(back.schedule.policy, SamplingPolicy::kUniform);
  EXPECT_DOUBLE_EQ(back.schedule.learning_rate, 0.005);
  for (const auto &key : PipelineConfig::Keys()) EXPECT_EQ(back.Get(key), c.Get(key)) << key;
}

TEST(PipelineConfigTest, Presets) {
  PipelineConfig desk = PipelineConfig::Preset("desk");
  EXPECT_EQ(desk.hidden_dim, 64);
  EXPECT_EQ(desk.num_hidden, 3);
  EXPECT_EQ(desk.ivector_dim, 10);
  EXPECT_EQ(desk.bottleneck_dim, 8);
  PipelineConfig paper = PipelineConfig::Preset("paper");
  EXPECT_EQ(paper.hidden_dim, 1024);
  EXPECT_EQ(paper.num_hidden, 6);
  EXPECT_EQ(paper.ivector_dim, 100);
  EXPECT_EQ(paper.bottleneck_dim, 39);
  EXPECT_NO_THROW(desk.Validate());
  EXPECT_NO_THROW(paper.Validate());
  EXPECT_THROW(PipelineConfig::Preset("huge"), ConfigError);
  // A file's values apply on top of its preset.
  PipelineConfig f = PipelineConfig::FromIni("[run]\npreset = paper\n[net]\nbottleneck_dim = 80\n");
  EXPECT_EQ(f.hidden_dim, 1024);
  EXPECT_EQ(f.bottleneck_dim, 80);
}

TEST(PipelineConfigTest, Errors) {
  PipelineConfig c = PipelineConfig::Preset("desk");
  EXPECT_THROW(c.Set("net.nope", "1"), ConfigError);
  EXPECT_THROW(c.Set("net.hidden_dim", "12x"), ConfigError);
  EXPECT_THROW(c.Set("net.sampling", "random"), ConfigError);
  EXPECT_THROW(PipelineConfig::FromIni("[net\nhidden_dim = 3\n"), ParseError);
  c.synth.utterances_per_language = 0;
  try {
    c.Validate();
    FAIL() << "zero utterances accepted";
  } catch (const ConfigError &e) {
    EXPECT_EQ(e.code(), ExitCode::kConfig);
  }
}

TEST(StageNameTest, RoundTrip) {
  EXPECT_EQ(AllStages().size(), 10u);
  for (Stage s : AllStages()) EXPECT_EQ(ParseStage(StageName(s)), s);
  EXPECT_FALSE(ParseStage("decode").has_value());
}

TEST_F(PipelineTest, SynthTwoLanguagesFiftyEach) {
  PipelineConfig c = SmallConfig();
  c.synth.languages = {"eng", "zul"};
  c.synth.utterances_per_language = 50;
  c.synth.num_cs_utterances = 0;
  Pipeline p(c, Path("run"));
  p.RunStage(Stage::kSynth, false);
  EXPECT_EQ(CountLines(Path("run/manifest.jsonl")), 100u);
  EXPECT_TRUE(fs::exists(Path("run/config.ini")));
}

TEST_F(PipelineTest, SynthIsDeterministic) {
  for (const char *run : {"a", "b"}) {
    Pipeline p(SmallConfig(), Path(run));
    p.RunStage(Stage::kSynth, false);
  }
  for (const char *f : {"manifest.jsonl", "audio.mbna", "gold.mbna"})
    EXPECT_EQ(FileChecksum(Path(std::string("a/") + f)), FileChecksum(Path(std::string("b/") + f)))
        << f;
  PipelineConfig other = SmallConfig();
  other.seed = 8;
  Pipeline p(other, Path("c"));
  p.RunStage(Stage::kSynth, false);
  EXPECT_NE(FileChecksum(Path("a/audio.mbna")), FileChecksum(Path("c/audio.mbna")));
}

TEST_F(PipelineTest, ExtractOneSecondExternalManifest) {
  AudioSegment a;
  a.samples.resize(16000);
  for (std::size_t i = 0; i < a.samples.size(); i++) a.samples[i] = 0.3 * std::sin(0.05 * i);
  WriteWav(Path("one.wav"), a);
  {
    std::ofstream m(Path("m.jsonl"));
    m << R"({"utt_id":"u1","audio":"one.wav","tokens":[["a","eng"]],"phones":[["a","eng"]]})"
      << "\n";
  }
  PipelineConfig c = SmallConfig();
  c.manifest = Path("m.jsonl");
  Pipeline p(c, Path("run"));
  p.SetExtractKinds({FeatureKind::kMfcc40});
  p.RunStage(Stage::kSynth, false);
  p.RunStage(Stage::kExtract, false);
  Archive ar(Path("run/features.mbna"));
  ASSERT_EQ(ar.records().size(), 1u);
  FeatureMatrix f = LoadFeatures(ar, "u1", FeatureKind::kMfcc40);
  EXPECT_EQ(f.NumFrames(), 98u);
  EXPECT_EQ(f.Dim(), 40u);
}

TEST_F(PipelineTest, MissingAudioListsIds) {
  {
    std::ofstream m(Path("m.jsonl"));
    for (const char *id : {"x1", "x2"})
      m << R"({"utt_id":")" << id << R"(","audio":"nowhere/)" << id
        << R"(.wav","tokens":[["a","eng"]],"phones":[["a","eng"]]})" << "\n";
  }
  PipelineConfig c = SmallConfig();
  c.manifest = Path("m.jsonl");
  Pipeline p(c, Path("run"));
  p.RunStage(Stage::kSynth, false);
  try {
    p.RunStage(Stage::kExtract, false);
    FAIL() << "missing audio accepted";
  } catch (const DataError &e) {
    EXPECT_EQ(e.code(), ExitCode::kMissingData);
    EXPECT_NE(std::string(e.what()).find("x1, x2"), std::string::npos) << e.what();
  }
}

TEST_F(PipelineTest, OverwriteAndMissingInputs) {
  Pipeline p(SmallConfig(), Path("run"));
  EXPECT_THROW(p.RunStage(Stage::kUbm, false), DataError);
  p.RunStage(Stage::kSynth, false);
  EXPECT_THROW(p.RunStage(Stage::kSynth, false), WouldOverwriteError);
  EXPECT_NO_THROW(p.RunStage(Stage::kSynth, true));
}

TEST_F(PipelineTest, RunDirectoryIsLocked) {
  Pipeline p(SmallConfig(), Path("run"));
  EXPECT_THROW(Pipeline(SmallConfig(), Path("run")), WouldOverwriteError);
}

TEST_F(PipelineTest, ConfigChangeNeedsForce) {
  {
    Pipeline p(SmallConfig(), Path("run"));
    p.RunStage(Stage::kSynth, false);
  }
  {
    PipelineConfig c = SmallConfig();
    c.seed = 99;
    Pipeline p(c, Path("run"));
    EXPECT_THROW(p.RunStage(Stage::kExtract, false), WouldOverwriteError);
    EXPECT_THROW(p.RunAll(false), WouldOverwriteError);
  }
  // Thread count is not part of the run's identity.
  PipelineConfig jobs = SmallConfig();
  jobs.jobs = 3;
  Pipeline p(jobs, Path("run"));
  EXPECT_NO_THROW(p.RunStage(Stage::kExtract, false));
}

TEST_F(PipelineTest, ResumeRerunsOnlyStaleStages) {
  {
    Pipeline p(SmallConfig(), Path("run"));
    auto summary = p.RunAll(false);
    EXPECT_EQ(p.executed().size(), AllStages().size());
    EXPECT_TRUE(summary["ac7"].contains(kBaselineSet));
    EXPECT_TRUE(summary["ac7"].contains(kCombinedSet));
    EXPECT_EQ(summary["probe"]["targets"], "gold");
  }
  std::string hyp = FileChecksum(Path("run/hyp-combined.txt"));
  fs::remove(Path("run/probe.json"));
  PipelineConfig c = SmallConfig();
  c.jobs = 2;
  Pipeline p(c, Path("run"));
  p.RunAll(false);
  EXPECT_EQ(p.executed(), std::vector<std::string>{"probe"});
  EXPECT_EQ(FileChecksum(Path("run/hyp-combined.txt")), hyp);
  p.RunAll(false);
  EXPECT_TRUE(p.executed().empty());
}

TEST_F(PipelineTest, CorruptArchiveIsIntegrityError) {
  Pipeline p(SmallConfig(), Path("run"));
  p.RunStage(Stage::kSynth, false);
  p.RunStage(Stage::kExtract, false);
  {
    std::fstream f(Path("run/features.mbna"), std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(200);
    char c = 0;
    f.read(&c, 1);
    f.seekp(200);
    c = static_cast<char>(c ^ 0x5a);
    f.write(&c, 1);
  }
  try {
    p.RunStage(Stage::kUbm, false);
    FAIL() << "corrupt archive accepted";
  } catch (const IntegrityError &e) {
    EXPECT_EQ(e.code(), ExitCode::kIntegrity);
  }
}

int RunCli(const std::string &args) {
  std::string cmd = std::string(MBNF_CLI) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(PipelineTest, CliExitCodes) {
  const std::string out = "--out " + Path("run");
  EXPECT_EQ(RunCli("--help"), 0);
  EXPECT_EQ(RunCli("frobnicate"), 64);
  EXPECT_EQ(RunCli(out + " extract --features mfcc99"), 64);
  EXPECT_EQ(RunCli(out + " --set corpus.utterances_per_language=0 synth"), 2);
  EXPECT_EQ(RunCli(out + " --set net.bogus=1 synth"), 2);
  EXPECT_EQ(RunCli(out + " ubm"), 3);
  EXPECT_EQ(RunCli(out + " --set corpus.utterances_per_language=4 synth"), 0);
  EXPECT_EQ(RunCli(out + " synth"), 4);
  EXPECT_EQ(RunCli(out + " synth --force"), 0);
}

}  // namespace
}  // namespace mbnf
