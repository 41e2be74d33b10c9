// src/pipeline/pipeline.cc

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

#include "mbnf/pipeline/pipeline.h"

#include <fcntl.h>
#include <signal.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "mbnf/align/mono-hmm.h"
#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"
#include "mbnf/base/parallel.h"
#include "mbnf/base/rng.h"
#include "mbnf/corpus/synth.h"
#include "mbnf/dsp/mfcc.h"
#include "mbnf/dsp/pitch.h"
#include "mbnf/gmm/gmm-em.h"
#include "mbnf/gmm/ivector.h"
#include "mbnf/io/archive.h"
#include "mbnf/io/records.h"
#include "mbnf/metrics/scoring.h"
#include "mbnf/nnet/features.h"
#include "mbnf/nnet/nnet-train.h"
#include "mbnf/nnet/probe.h"

namespace mbnf {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr std::pair<Stage, std::string_view> kStageNames[] = {
    {Stage::kSynth, "synth"},         {Stage::kExtract, "extract"},
    {Stage::kUbm, "ubm"},             {Stage::kIvector, "ivector"},
    {Stage::kAlign, "align"},         {Stage::kMbnfTrain, "mbnf-train"},
    {Stage::kMbnfExtract, "mbnf-extract"}, {Stage::kCombine, "combine"},
    {Stage::kProbe, "probe"},         {Stage::kScore, "score"},
};

const char *kFeatures = "features.mbna";
const char *kManifest = "manifest.jsonl";

std::string JoinIds(const std::vector<std::string> &ids, std::size_t max = 20) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < max; i++) out += (i ? ", " : "") + ids[i];
  if (ids.size() > max) out += fmt::format(" (+{} more)", ids.size() - max);
  return out;
}

void WriteText(const std::string &path, const std::string &text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp);
    out << text;
  }
  fs::rename(tmp, path);
}

std::string ReadText(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Language index shared by all phones of the record, or nullopt when mixed.
std::optional<int> RecordLanguage(const UtteranceRecord &r, const LanguageInventory &inv) {
  if (r.phones.empty()) throw ValidationError("utterance " + r.utt_id + " has no phones");
  for (const auto &p : r.phones)
    if (p.lang != r.phones[0].lang) return std::nullopt;
  return inv.Require(r.phones[0].lang).index;
}

std::string ConfigHash(PipelineConfig c) {
  c.jobs = 1;
  return fmt::format("{:016x}", HashName(c.ToIni()));
}

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double Seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

}  // namespace

std::string_view StageName(Stage stage) {
  for (const auto &[s, n] : kStageNames)
    if (s == stage) return n;
  return "unknown";
}

std::optional<Stage> ParseStage(std::string_view name) {
  for (const auto &[s, n] : kStageNames)
    if (n == name) return s;
  return std::nullopt;
}

const std::vector<Stage> &AllStages() {
  static const std::vector<Stage> kAll = [] {
    std::vector<Stage> v;
    for (const auto &[s, n] : kStageNames) v.push_back(s);
    return v;
  }();
  return kAll;
}

struct Pipeline::Corpus {
  std::vector<UtteranceRecord> records;
  LanguageInventory inventory;
  std::vector<PhoneSet> phonesets;
  std::vector<bool> is_test;
  std::vector<std::optional<int>> lang;  // per record; nullopt when code-switched
};

Pipeline::Pipeline(PipelineConfig config, std::string run_dir)
    : config_(std::move(config)), run_dir_(std::move(run_dir)) {
  config_.Validate();
  config_.PropagateSeed();
  fs::create_directories(run_dir_);
  fs::create_directories(Path("stamps"));
  const std::string lock = Path(".lock");
  for (int attempt = 0; attempt < 2 && lock_fd_ < 0; attempt++) {
    lock_fd_ = open(lock.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (lock_fd_ >= 0) break;
    std::ifstream in(lock);
    long pid = 0;
    in >> pid;
    if (pid > 0 && kill(static_cast<pid_t>(pid), 0) == 0)
      throw WouldOverwriteError("run directory " + run_dir_ + " is in use by process " +
                                std::to_string(pid));
    fs::remove(lock);  // stale
  }
  if (lock_fd_ < 0) throw DataError("cannot create lock file " + lock);
  std::string pid = std::to_string(getpid());
  if (write(lock_fd_, pid.data(), pid.size()) < 0) Log().warn("cannot write {}", lock);
}

Pipeline::~Pipeline() {
  if (lock_fd_ >= 0) {
    close(lock_fd_);
    std::error_code ec;
    fs::remove(Path(".lock"), ec);
  }
}

std::string Pipeline::Path(const std::string &name) const { return (fs::path(run_dir_) / name).string(); }

std::vector<std::string> Pipeline::Outputs(Stage stage) const {
  const bool synthetic = config_.manifest.empty();
  switch (stage) {
    case Stage::kSynth:
      if (synthetic) return {kManifest, "audio.mbna", "gold.mbna"};
      return {kManifest};
    case Stage::kExtract: return {kFeatures};
    case Stage::kUbm: return {"ubm.mbna"};
    case Stage::kIvector: return {"tmatrix.mbna", "ivectors.mbna"};
    case Stage::kAlign: return {"align.mbna"};
    case Stage::kMbnfTrain: return {"net.mbna"};
    case Stage::kMbnfExtract: return {"bnf.mbna"};
    case Stage::kCombine: return {"combined.mbna"};
    case Stage::kProbe:
      return {"probe.json", fmt::format("hyp-{}.txt", kBaselineSet),
              fmt::format("hyp-{}.txt", kCombinedSet)};
    case Stage::kScore:
      return {fmt::format("score-{}.json", kBaselineSet),
              fmt::format("score-{}.json", kCombinedSet)};
  }
  return {};
}

std::vector<std::string> Pipeline::Inputs(Stage stage) const {
  const bool synthetic = config_.manifest.empty();
  switch (stage) {
    case Stage::kSynth: return {};
    case Stage::kExtract:
      if (synthetic) return {kManifest, "audio.mbna"};
      return {kManifest};
    case Stage::kUbm: return {kManifest, kFeatures};
    case Stage::kIvector: return {kManifest, kFeatures, "ubm.mbna"};
    case Stage::kAlign:
      if (synthetic) return {kManifest, kFeatures, "gold.mbna"};
      return {kManifest, kFeatures};
    case Stage::kMbnfTrain: return {kManifest, kFeatures, "ivectors.mbna", "align.mbna"};
    case Stage::kMbnfExtract: return {kManifest, kFeatures, "ivectors.mbna", "net.mbna"};
    case Stage::kCombine: return {kManifest, kFeatures, "ivectors.mbna", "bnf.mbna"};
    case Stage::kProbe:
      return {kManifest, kFeatures, "combined.mbna", synthetic ? "gold.mbna" : "align.mbna"};
    case Stage::kScore: {
      auto v = Outputs(Stage::kProbe);
      v[0] = kManifest;
      return v;
    }
  }
  return {};
}

void Pipeline::CheckConfig(bool force) {
  const std::string path = Path("config.ini");
  const std::string text = config_.ToIni();
  if (fs::exists(path) && !force) {
    PipelineConfig old = PipelineConfig::FromIni(ReadText(path));
    if (ConfigHash(old) != ConfigHash(config_))
      throw WouldOverwriteError("run directory " + run_dir_ +
                                " was created with a different config; use --force to replace it");
  }
  WriteText(path, text);
}

bool Pipeline::UpToDate(Stage stage) const {
  const std::string stamp = Path(fmt::format("stamps/{}.json", StageName(stage)));
  if (!fs::exists(stamp)) return false;
  json j;
  try {
    j = json::parse(ReadText(stamp));
  } catch (const json::exception &) {
    return false;
  }
  if (j.value("config", "") != ConfigHash(config_)) return false;
  for (const char *group : {"inputs", "outputs"})
    for (const auto &[file, crc] : j[group].items()) {
      if (!fs::exists(Path(file))) return false;
      if (FileChecksum(Path(file)) != crc.get<std::string>()) return false;
    }
  return true;
}

void Pipeline::WriteStamp(Stage stage, double seconds) {
  json j;
  j["stage"] = StageName(stage);
  j["config"] = ConfigHash(config_);
  j["seconds"] = seconds;
  for (const auto &f : Inputs(stage)) j["inputs"][f] = FileChecksum(Path(f));
  for (const auto &f : Outputs(stage)) j["outputs"][f] = FileChecksum(Path(f));
  WriteText(Path(fmt::format("stamps/{}.json", StageName(stage))), j.dump(2) + "\n");
}

void Pipeline::RunStage(Stage stage, bool force) {
  std::vector<std::string> missing, existing;
  for (const auto &f : Inputs(stage))
    if (!fs::exists(Path(f))) missing.push_back(f);
  if (!missing.empty())
    throw DataError(fmt::format("stage {} needs {} in {}; run the earlier stages first",
                                StageName(stage), JoinIds(missing), run_dir_));
  CheckConfig(force);
  for (const auto &f : Outputs(stage))
    if (fs::exists(Path(f))) existing.push_back(f);
  if (!existing.empty() && !force)
    throw WouldOverwriteError(fmt::format("stage {} would overwrite {}; use --force",
                                          StageName(stage), JoinIds(existing)));
  Execute(stage);
}

void Pipeline::Execute(Stage stage) {
  Log().info("stage {}", StageName(stage));
  Timer timer;
  switch (stage) {
    case Stage::kSynth: RunSynth(); break;
    case Stage::kExtract: RunExtract(); break;
    case Stage::kUbm: RunUbm(); break;
    case Stage::kIvector: RunIvector(); break;
    case Stage::kAlign: RunAlign(); break;
    case Stage::kMbnfTrain: RunMbnfTrain(); break;
    case Stage::kMbnfExtract: RunMbnfExtract(); break;
    case Stage::kCombine: RunCombine(); break;
    case Stage::kProbe: RunProbe(); break;
    case Stage::kScore: RunScore(); break;
  }
  double seconds = timer.Seconds();
  stage_seconds_[std::string(StageName(stage))] = seconds;
  executed_.emplace_back(StageName(stage));
  WriteStamp(stage, seconds);
  Log().info("stage {} done in {:.2f} s", StageName(stage), seconds);
}

json Pipeline::RunAll(bool force) {
  CheckConfig(force);
  executed_.clear();
  json stages = json::object();
  for (Stage s : AllStages()) {
    const std::string name(StageName(s));
    if (!force && UpToDate(s)) {
      Log().info("stage {} is up to date", name);
      json stamp = json::parse(ReadText(Path("stamps/" + name + ".json")));
      stages[name] = {{"seconds", stamp["seconds"]}, {"skipped", true}};
      continue;
    }
    Execute(s);
    stages[name] = {{"seconds", stage_seconds_[name]}, {"skipped", false}};
  }

  json summary;
  summary["seed"] = config_.seed;
  summary["preset"] = config_.preset;
  summary["stages"] = stages;
  json probe = json::parse(ReadText(Path("probe.json")));
  const double base = probe["sets"][kBaselineSet]["overall"];
  const double comb = probe["sets"][kCombinedSet]["overall"];
  summary["ac7"] = {{kBaselineSet, base}, {kCombinedSet, comb}, {"improvement", comb - base}};
  summary["probe"] = probe;
  for (const char *set : {kBaselineSet, kCombinedSet})
    summary["scores"][set] = json::parse(ReadText(Path(fmt::format("score-{}.json", set))));
  for (Stage s : AllStages())
    for (const auto &f : Outputs(s))
      if (f.ends_with(".mbna")) summary["archives"][f] = FileChecksum(Path(f));
  json align_info = json::parse(ReadText(Path("stamps/align-info.json")));
  summary["alignment"] = align_info;
  WriteText(Path("summary.json"), summary.dump(2) + "\n");
  return summary;
}

const Pipeline::Corpus &Pipeline::LoadCorpus() {
  if (corpus_) return *corpus_;
  auto c = std::make_unique<Corpus>();
  c->records = LoadManifest(Path(kManifest));
  if (c->records.empty()) throw DataError("manifest " + Path(kManifest) + " is empty");
  if (config_.manifest.empty()) {
    SynthConfig sc = MakeSynthConfig(config_.synth);
    c->inventory = sc.Inventory();
    for (const auto &l : sc.languages) c->phonesets.push_back(l.phoneset);
  } else {
    c->inventory = InventoryFromRecords(c->records);
    c->phonesets = DerivePhoneSets(c->records, c->inventory, config_.synth.states_per_phone);
  }
  CheckLanguageClosure(c->records, c->inventory);
  for (std::size_t i = 0; i < c->records.size(); i++) {
    c->is_test.push_back(static_cast<int>(i % config_.test_every) == config_.test_every - 1);
    c->lang.push_back(RecordLanguage(c->records[i], c->inventory));
  }
  corpus_ = std::move(c);
  return *corpus_;
}

void Pipeline::RunSynth() {
  corpus_.reset();
  if (!config_.manifest.empty()) {
    std::vector<UtteranceRecord> records = LoadManifest(config_.manifest);
    const fs::path base = fs::absolute(config_.manifest).parent_path();
    for (auto &r : records)
      if (!r.audio_ref.empty() && r.audio_ref.find('#') == std::string::npos &&
          fs::path(r.audio_ref).is_relative())
        r.audio_ref = (base / r.audio_ref).lexically_normal().string();
    SaveManifest(Path(kManifest), records);
    return;
  }
  SynthConfig sc = MakeSynthConfig(config_.synth);
  std::vector<SynthWaveform> waves = SynthWaveforms(sc);
  std::vector<UtteranceRecord> records;
  std::vector<AudioSegment> audio;
  ArchiveWriter gold(Path("gold.mbna"));
  for (auto &w : waves) {
    w.record.audio_ref = "audio.mbna#" + w.record.utt_id;
    records.push_back(w.record);
    audio.push_back(std::move(w.audio));
    gold.Add(AlignRecord(w.gold));
  }
  WriteAudioArchive(Path("audio.mbna"), audio);
  gold.Commit();
  SaveManifest(Path(kManifest), records);
  Log().info("synthesized {} utterances in {} languages", records.size(), sc.languages.size());
}

void Pipeline::RunExtract() {
  const Corpus &c = LoadCorpus();
  std::vector<FeatureKind> kinds = extract_kinds_;
  if (kinds.empty()) kinds = {FeatureKind::kMfcc13dd, FeatureKind::kMfcc40, FeatureKind::kPitch3};

  std::map<std::string, std::unique_ptr<Archive>> archives;
  std::vector<std::string> missing;
  std::vector<std::pair<const Archive *, std::string>> sources(c.records.size());
  for (std::size_t i = 0; i < c.records.size(); i++) {
    const std::string &ref = c.records[i].audio_ref;
    auto hash = ref.find('#');
    if (ref.empty()) {
      missing.push_back(c.records[i].utt_id);
    } else if (hash == std::string::npos) {
      if (!fs::exists(ref)) missing.push_back(c.records[i].utt_id);
      sources[i] = {nullptr, ref};
    } else {
      std::string file = ref.substr(0, hash), key = ref.substr(hash + 1);
      fs::path p = fs::path(file).is_relative() ? fs::path(run_dir_) / file : fs::path(file);
      auto &ar = archives[p.string()];
      if (!ar && fs::exists(p)) ar = std::make_unique<Archive>(p.string());
      if (!ar || !ar->Find(key, RecordKind::kAudio))
        missing.push_back(c.records[i].utt_id);
      else
        sources[i] = {ar.get(), key};
    }
  }
  if (!missing.empty())
    throw DataError(fmt::format("missing audio for {} utterance(s): {}", missing.size(),
                                JoinIds(missing)));

  const MfccConfig mfcc13 = MfccConfig::Mfcc13(), mfcc40 = MfccConfig::Mfcc40();
  std::vector<std::vector<FeatureMatrix>> out(c.records.size());
  ParallelFor(c.records.size(), config_.jobs, [&](std::size_t i) {
    AudioSegment audio = sources[i].first
                             ? LoadAudio(*sources[i].first, sources[i].second)
                             : ReadWav(sources[i].second, c.records[i].utt_id);
    audio.utt_id = c.records[i].utt_id;
    for (FeatureKind k : kinds) {
      FeatureMatrix f;
      if (k == FeatureKind::kMfcc13dd) f = AddDeltas(Mfcc(audio, mfcc13));
      if (k == FeatureKind::kMfcc40) f = Mfcc(audio, mfcc40);
      if (k == FeatureKind::kPitch3) f = Pitch3(audio);
      f.utt_id = audio.utt_id;
      f.Validate();
      if (!out[i].empty() && out[i][0].NumFrames() != f.NumFrames())
        throw InternalError("feature kinds disagree on frame count for " + f.utt_id);
      out[i].push_back(std::move(f));
    }
  });
  ArchiveWriter w(Path(kFeatures));
  for (const auto &feats : out)
    for (const auto &f : feats) w.Add(FeatureRecord(f));
  w.Commit();
}

void Pipeline::RunUbm() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures));
  std::vector<Matrix> frames;
  for (std::size_t i = 0; i < c.records.size(); i++)
    if (!c.is_test[i])
      frames.push_back(LoadFeatures(feats, c.records[i].utt_id, FeatureKind::kMfcc40).data);
  FrameSet set;
  for (const auto &m : frames) set.push_back(&m);
  GmmEmOptions opts;
  opts.num_comp = config_.ubm_components;
  opts.iters = config_.ubm_iters;
  opts.seed = SubSeed(config_.seed, HashName("ubm"));
  opts.num_jobs = config_.jobs;
  GmmEmResult r = EmFitGmm(set, opts);
  ArchiveWriter w(Path("ubm.mbna"));
  w.Add(GmmRecord("ubm", r.gmm));
  w.Commit();
  Log().info("ubm: {} components, avg loglik {:.3f} -> {:.3f}", r.gmm.NumComp(),
             r.loglik.front() / TotalFrames(set), r.loglik.back() / TotalFrames(set));
}

void Pipeline::RunIvector() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures));
  DiagGmm ubm = GmmFromRecord(Archive(Path("ubm.mbna")).Require("ubm", RecordKind::kGmm));
  std::vector<Matrix> mfcc(c.records.size());
  for (std::size_t i = 0; i < c.records.size(); i++)
    mfcc[i] = LoadFeatures(feats, c.records[i].utt_id, FeatureKind::kMfcc40).data;
  std::vector<std::size_t> train;
  for (std::size_t i = 0; i < c.records.size(); i++)
    if (!c.is_test[i]) train.push_back(i);
  std::vector<BwStats> stats(train.size());
  ParallelFor(train.size(), config_.jobs,
              [&](std::size_t k) { stats[k] = AccumulateBwStats(ubm, mfcc[train[k]]); });
  TMatrixOptions opts;
  opts.ivec_dim = config_.ivector_dim;
  opts.iters = config_.ivector_iters;
  opts.seed = SubSeed(config_.seed, HashName("tmatrix"));
  opts.num_jobs = config_.jobs;
  TMatrixResult r = TrainTMatrix(ubm, stats, opts);
  ArchiveWriter tw(Path("tmatrix.mbna"));
  for (auto &rec : TvModelRecords(r.model)) tw.Add(std::move(rec));
  tw.Commit();

  std::vector<std::vector<double>> ivecs(c.records.size());
  ParallelFor(c.records.size(), config_.jobs,
              [&](std::size_t i) { ivecs[i] = ExtractIvector(r.model, mfcc[i]); });
  ArchiveWriter iw(Path("ivectors.mbna"));
  for (std::size_t i = 0; i < c.records.size(); i++)
    iw.Add(Record::FromMatrix(c.records[i].utt_id, RecordKind::kIvec,
                              Matrix(1, ivecs[i].size(), ivecs[i])));
  iw.Commit();
}

void Pipeline::RunAlign() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures));
  std::vector<Matrix> mfcc(c.records.size());
  for (std::size_t i = 0; i < c.records.size(); i++)
    mfcc[i] = LoadFeatures(feats, c.records[i].utt_id, FeatureKind::kMfcc13dd).data;

  json info;
  std::vector<MonoHmmSet> sets(c.phonesets.size());
  for (std::size_t l = 0; l < c.phonesets.size(); l++) {
    std::vector<AlignInput> utts;
    for (std::size_t i = 0; i < c.records.size(); i++)
      if (!c.is_test[i] && c.lang[i] == static_cast<int>(l))
        utts.push_back({&c.records[i], &mfcc[i]});
    if (utts.empty())
      throw DataError("no monolingual training utterances for " + c.inventory.At(l).code);
    MonoHmmOptions opts;
    opts.num_gauss = config_.align_gauss;
    opts.seed = SubSeed(config_.seed, HashName("align"), l);
    opts.num_jobs = config_.jobs;
    MonophoneResult r = TrainMonophone(utts, c.phonesets[l], config_.align_iters, opts);
    info["loglik"][c.inventory.At(l).code] = r.loglik;
    sets[l] = std::move(r.hmms);
  }
  std::vector<const MonoHmmSet *> set_ptrs;
  for (const auto &s : sets) set_ptrs.push_back(&s);

  std::vector<std::optional<AlignmentMatrix>> out(c.records.size());
  ParallelFor(c.records.size(), config_.jobs, [&](std::size_t i) {
    try {
      out[i] = c.lang[i] ? ViterbiAlign(sets[*c.lang[i]], mfcc[i], c.records[i]).alignment
                         : ViterbiAlignMixed(set_ptrs, c.inventory, mfcc[i], c.records[i]).alignment;
    } catch (const DataError &e) {
      Log().warn("align: skipping {}: {}", c.records[i].utt_id, e.what());
    }
  });
  ArchiveWriter w(Path("align.mbna"));
  std::vector<std::string> skipped;
  for (std::size_t i = 0; i < c.records.size(); i++) {
    if (out[i])
      w.Add(AlignRecord(*out[i]));
    else
      skipped.push_back(c.records[i].utt_id);
  }
  w.Commit();
  info["skipped"] = skipped;

  if (fs::exists(Path("gold.mbna"))) {
    Archive gold(Path("gold.mbna"));
    std::size_t agree[2] = {0, 0}, total[2] = {0, 0};
    for (std::size_t i = 0; i < c.records.size(); i++) {
      if (!out[i]) continue;
      AlignmentMatrix g = AlignFromRecord(gold.Require(c.records[i].utt_id, RecordKind::kAlign));
      if (g.NumFrames() != out[i]->NumFrames())
        throw InternalError("gold and aligned frame counts differ for " + g.utt_id);
      const int split = c.is_test[i] ? 1 : 0;
      for (std::size_t t = 0; t < g.NumFrames(); t++) {
        agree[split] += g.frame_lang[t] == out[i]->frame_lang[t] &&
                        g.frame_state[t] == out[i]->frame_state[t];
        total[split]++;
      }
    }
    info["frame_accuracy_train"] = total[0] ? double(agree[0]) / total[0] : 0.0;
    info["frame_accuracy_test"] = total[1] ? double(agree[1]) / total[1] : 0.0;
    Log().info("align: frame-state accuracy vs gold {:.4f} (train), {:.4f} (test)",
               info["frame_accuracy_train"].get<double>(), info["frame_accuracy_test"].get<double>());
  }
  WriteText(Path("stamps/align-info.json"), info.dump(2) + "\n");
}

namespace {

// mfcc40 | pitch3 | i-vector, the extractor network's input.
FeatureMatrix NetInputFeatures(const Archive &feats, const Archive &ivecs, const std::string &id) {
  FeatureMatrix mfcc = LoadFeatures(feats, id, FeatureKind::kMfcc40);
  FeatureMatrix pitch = LoadFeatures(feats, id, FeatureKind::kPitch3);
  Matrix iv = ivecs.Require(id, RecordKind::kIvec).ToMatrix();
  return CombineFeatures({&mfcc, &pitch}, iv.Values());
}

}  // namespace

void Pipeline::RunMbnfTrain() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures)), ivecs(Path("ivectors.mbna")), align(Path("align.mbna"));
  std::vector<Matrix> inputs;
  std::vector<AlignmentMatrix> alis;
  for (std::size_t i = 0; i < c.records.size(); i++) {
    const Record *a = align.Find(c.records[i].utt_id, RecordKind::kAlign);
    if (c.is_test[i] || !a) continue;
    inputs.push_back(NetInputFeatures(feats, ivecs, c.records[i].utt_id).data);
    alis.push_back(AlignFromRecord(*a));
  }
  if (inputs.empty()) throw DataError("mbnf-train: no aligned training utterances");

  NetSpec spec;
  spec.feat_dim = static_cast<int>(inputs[0].NumCols());
  spec.hidden_dim = config_.hidden_dim;
  spec.num_hidden = config_.num_hidden;
  spec.contexts = NetSpec::DefaultContexts(config_.num_hidden);
  spec.bottleneck_dim = config_.bottleneck_dim;
  for (const auto &ps : c.phonesets) spec.blocks.push_back({ps.lang().code, ps.BlockSize()});
  spec.seed = SubSeed(config_.seed, HashName("net"));

  std::vector<TrainUtterance> data;
  for (std::size_t k = 0; k < inputs.size(); k++) {
    std::set<std::uint32_t> langs(alis[k].frame_lang.begin(), alis[k].frame_lang.end());
    for (std::uint32_t l : langs)
      data.push_back({&inputs[k], AlignmentToTargets(alis[k], static_cast<int>(l),
                                                     c.phonesets[l].BlockSize()),
                      c.phonesets[l].lang().code});
  }
  BlockSoftmaxNet net(spec);
  FitInputNormalization(&net, data);
  TrainReport report = Train(&net, data, config_.schedule);
  ArchiveWriter w(Path("net.mbna"));
  for (auto &r : NetRecords(net)) w.Add(std::move(r));
  w.Commit();
  json j;
  j["epoch_loss"] = report.epoch_loss;
  j["batches_per_block"] = report.batches_per_block;
  WriteText(Path("stamps/mbnf-train-info.json"), j.dump(2) + "\n");
}

void Pipeline::RunMbnfExtract() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures)), ivecs(Path("ivectors.mbna"));
  BlockSoftmaxNet net = NetFromArchive(Archive(Path("net.mbna")));
  std::vector<FeatureMatrix> out(c.records.size());
  ParallelFor(c.records.size(), config_.jobs, [&](std::size_t i) {
    out[i] = ExtractBnf(net, NetInputFeatures(feats, ivecs, c.records[i].utt_id));
  });
  ArchiveWriter w(Path("bnf.mbna"));
  for (const auto &f : out) w.Add(FeatureRecord(f));
  w.Commit();
}

void Pipeline::RunCombine() {
  const Corpus &c = LoadCorpus();
  Archive feats(Path(kFeatures)), ivecs(Path("ivectors.mbna")), bnfs(Path("bnf.mbna"));
  ArchiveWriter w(Path("combined.mbna"));
  for (const auto &r : c.records) {
    FeatureMatrix mfcc = LoadFeatures(feats, r.utt_id, FeatureKind::kMfcc40);
    FeatureMatrix pitch = LoadFeatures(feats, r.utt_id, FeatureKind::kPitch3);
    FeatureMatrix bnf = LoadFeatures(bnfs, r.utt_id, FeatureKind::kBnf);
    Matrix iv = ivecs.Require(r.utt_id, RecordKind::kIvec).ToMatrix();
    w.Add(FeatureRecord(CombineFeatures({&mfcc, &pitch, &bnf}, iv.Values())));
  }
  w.Commit();
}

namespace {

// Frame-level decode into phone tokens: best state per frame, runs of one
// phone collapsed, runs shorter than min_run dropped.
std::vector<std::string> DecodeTokens(const ProbeClassifier &probe,
                                      const std::vector<PhoneSet> &phonesets, const Matrix &feats,
                                      std::optional<int> lang, int min_run) {
  std::vector<Matrix> post;
  for (std::size_t b = 0; b < phonesets.size(); b++)
    post.push_back(lang && *lang != static_cast<int>(b) ? Matrix()
                                                        : probe.Posteriors(feats, static_cast<int>(b)));
  std::vector<std::string> frames;
  for (std::size_t t = 0; t < feats.NumRows(); t++) {
    double best = -1.0;
    std::string sym;
    for (std::size_t b = 0; b < post.size(); b++) {
      if (post[b].Empty()) continue;
      auto row = post[b].Row(t);
      auto it = std::max_element(row.begin(), row.end());
      if (*it > best) {
        best = *it;
        int state = static_cast<int>(it - row.begin());
        sym = phonesets[b].phones()[state / phonesets[b].states_per_phone()];
      }
    }
    frames.push_back(sym);
  }
  std::vector<std::string> tokens;
  for (std::size_t t = 0; t < frames.size();) {
    std::size_t e = t;
    while (e < frames.size() && frames[e] == frames[t]) e++;
    if (static_cast<int>(e - t) >= min_run && (tokens.empty() || tokens.back() != frames[t]))
      tokens.push_back(frames[t]);
    t = e;
  }
  return tokens;
}

}  // namespace

void Pipeline::RunProbe() {
  const Corpus &c = LoadCorpus();
  const bool gold_targets = fs::exists(Path("gold.mbna")) && config_.manifest.empty();
  Archive targets_ar(Path(gold_targets ? "gold.mbna" : "align.mbna"));
  Archive feats(Path(kFeatures)), combined(Path("combined.mbna"));

  std::vector<OutputBlock> blocks;
  for (const auto &ps : c.phonesets) blocks.push_back({ps.lang().code, ps.BlockSize()});

  json out;
  out["targets"] = gold_targets ? "gold" : "align";
  for (const char *set : {kBaselineSet, kCombinedSet}) {
    const bool is_combined = std::string(set) == kCombinedSet;
    std::vector<Matrix> mats(c.records.size());
    std::vector<TrainUtterance> train, test;
    for (std::size_t i = 0; i < c.records.size(); i++) {
      const std::string &id = c.records[i].utt_id;
      mats[i] = is_combined ? LoadFeatures(combined, id, FeatureKind::kCombined).data
                            : LoadFeatures(feats, id, FeatureKind::kMfcc40).data;
    }
    for (std::size_t i = 0; i < c.records.size(); i++) {
      const Record *r = targets_ar.Find(c.records[i].utt_id, RecordKind::kAlign);
      if (!r) continue;
      AlignmentMatrix ali = AlignFromRecord(*r);
      if (ali.NumFrames() != mats[i].NumRows())
        throw InternalError("targets and features disagree on frames for " + ali.utt_id);
      std::set<std::uint32_t> langs(ali.frame_lang.begin(), ali.frame_lang.end());
      for (std::uint32_t l : langs)
        (c.is_test[i] ? test : train)
            .push_back({&mats[i],
                        AlignmentToTargets(ali, static_cast<int>(l), blocks[l].size),
                        blocks[l].lang});
    }
    if (train.empty()) throw DataError("probe: no training utterances with targets");
    ProbeClassifier probe(blocks, static_cast<int>(mats[0].NumCols()));
    probe.Train(train, config_.probe);
    ProbeReport rep = EvaluateProbe(probe, test);
    json j;
    j["overall"] = rep.overall;
    for (std::size_t b = 0; b < rep.langs.size(); b++) {
      j["languages"][rep.langs[b]]["accuracy"] =
          rep.frames[b] ? json(rep.accuracy[b]) : json(nullptr);
      j["languages"][rep.langs[b]]["frames"] = rep.frames[b];
    }
    j["dim"] = mats[0].NumCols();
    out["sets"][set] = j;
    Log().info("probe {}: held-out frame accuracy {:.4f}", set, rep.overall);

    std::vector<Hypothesis> hyps;
    for (std::size_t i = 0; i < c.records.size(); i++)
      if (c.is_test[i])
        hyps.push_back({c.records[i].utt_id,
                        DecodeTokens(probe, c.phonesets, mats[i], c.lang[i], config_.decode_min_run)});
    std::ostringstream hs;
    WriteHypotheses(hyps, hs);
    WriteText(Path(fmt::format("hyp-{}.txt", set)), hs.str());
  }
  WriteText(Path("probe.json"), out.dump(2) + "\n");
}

void Pipeline::RunScore() {
  const Corpus &c = LoadCorpus();
  std::vector<UtteranceRecord> refs;
  for (std::size_t i = 0; i < c.records.size(); i++)
    if (c.is_test[i]) refs.push_back(c.records[i]);
  for (const char *set : {kBaselineSet, kCombinedSet}) {
    ScoreReport r = ScoreCorpus(refs, LoadHypotheses(Path(fmt::format("hyp-{}.txt", set))));
    Log().info("score {}:\n{}", set, r.ToTable());
    WriteText(Path(fmt::format("score-{}.json", set)), r.ToJson().dump(2) + "\n");
  }
}

json Pipeline::ScoreFiles(const std::string &manifest, const std::string &hyps) {
  std::vector<Hypothesis> h = LoadHypotheses(hyps);
  std::set<std::string> ids;
  for (const auto &x : h) ids.insert(x.utt_id);
  std::vector<UtteranceRecord> refs;
  std::vector<UtteranceRecord> all = LoadManifest(manifest);
  // Only utterances with a hypothesis are scored; unknown ids still fail.
  for (auto &r : all)
    if (ids.count(r.utt_id)) refs.push_back(std::move(r));
  std::set<std::string> known;
  for (const auto &r : refs) known.insert(r.utt_id);
  std::vector<std::string> unknown;
  for (const auto &id : ids)
    if (!known.count(id)) unknown.push_back(id);
  if (!unknown.empty())
    throw DataError("hypotheses without a reference: " + JoinIds(unknown));
  ScoreReport r = ScoreCorpus(refs, h);
  std::cout << r.ToTable();
  return r.ToJson();
}

}  // namespace mbnf
