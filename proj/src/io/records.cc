// src/io/records.cc

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

#include "mbnf/io/records.h"

#include <algorithm>
#include <cstring>

#include "json.hpp"
#include "mbnf/base/error.h"

namespace mbnf {

Record FeatureRecord(const FeatureMatrix &feats) {
  return Record::FromMatrix(feats.utt_id, static_cast<RecordKind>(feats.kind), feats.data);
}

FeatureMatrix FeatureFromRecord(const Record &r) {
  auto kind = static_cast<FeatureKind>(r.kind);
  if (FeatureKindName(kind) == "unknown")
    throw ValidationError("record " + r.key + " is not a feature record (" +
                          RecordKindName(r.kind) + ")");
  FeatureMatrix f;
  f.utt_id = r.key;
  f.kind = kind;
  f.data = r.ToMatrix();
  return f;
}

FeatureMatrix LoadFeatures(const Archive &archive, const std::string &utt_id, FeatureKind kind) {
  return FeatureFromRecord(archive.Require(utt_id, static_cast<RecordKind>(kind)));
}

Record AlignRecord(const AlignmentMatrix &ali) {
  std::vector<std::uint32_t> v;
  v.reserve(2 * ali.NumFrames());
  for (std::size_t t = 0; t < ali.NumFrames(); t++) {
    v.push_back(ali.frame_lang[t]);
    v.push_back(ali.frame_state[t]);
  }
  return Record::FromU32(ali.utt_id, RecordKind::kAlign,
                         static_cast<std::uint32_t>(ali.NumFrames()), 2, v);
}

AlignmentMatrix AlignFromRecord(const Record &r) {
  if (r.kind != static_cast<std::uint8_t>(RecordKind::kAlign) || r.cols != 2)
    throw ValidationError("record " + r.key + " is not an alignment");
  std::vector<std::uint32_t> v = r.ToU32();
  AlignmentMatrix ali;
  ali.utt_id = r.key;
  for (std::size_t t = 0; t < r.rows; t++) {
    ali.frame_lang.push_back(v[2 * t]);
    ali.frame_state.push_back(v[2 * t + 1]);
  }
  if (!ali.frame_lang.empty() &&
      std::all_of(ali.frame_lang.begin(), ali.frame_lang.end(),
                  [&](std::uint32_t l) { return l == ali.frame_lang[0]; }))
    ali.lang = static_cast<int>(ali.frame_lang[0]);
  return ali;
}

Record GmmRecord(const std::string &key, const DiagGmm &gmm) {
  const int c = gmm.NumComp(), d = gmm.Dim();
  Matrix m(c, 1 + 2 * d);
  for (int i = 0; i < c; i++) {
    m(i, 0) = gmm.weights()[i];
    for (int j = 0; j < d; j++) {
      m(i, 1 + j) = gmm.means()(i, j);
      m(i, 1 + d + j) = gmm.vars()(i, j);
    }
  }
  return Record::FromMatrix(key, RecordKind::kGmm, m);
}

DiagGmm GmmFromRecord(const Record &r) {
  if (r.kind != static_cast<std::uint8_t>(RecordKind::kGmm) || r.cols < 3 || r.cols % 2 == 0)
    throw ValidationError("record " + r.key + " is not a GMM");
  Matrix m = r.ToMatrix();
  const std::size_t c = m.NumRows(), d = (m.NumCols() - 1) / 2;
  std::vector<double> w(c);
  Matrix means(c, d), vars(c, d);
  for (std::size_t i = 0; i < c; i++) {
    w[i] = m(i, 0);
    for (std::size_t j = 0; j < d; j++) {
      means(i, j) = m(i, 1 + j);
      vars(i, j) = m(i, 1 + d + j);
    }
  }
  return DiagGmm(std::move(w), std::move(means), std::move(vars));
}

std::vector<Record> TvModelRecords(const TvModel &model) {
  return {GmmRecord("ubm", model.ubm), Record::FromMatrix("t", RecordKind::kTMatrix, model.t)};
}

TvModel TvModelFromArchive(const Archive &archive) {
  TvModel m;
  m.ubm = GmmFromRecord(archive.Require("ubm", RecordKind::kGmm));
  m.t = archive.Require("t", RecordKind::kTMatrix).ToMatrix();
  if (m.t.NumRows() != static_cast<std::size_t>(m.ubm.NumComp() * m.ubm.Dim()))
    throw ValidationError("T matrix rows do not match the UBM");
  return m;
}

void WriteAudioArchive(const std::string &path, const std::vector<AudioSegment> &audio) {
  ArchiveWriter w(path);
  if (!audio.empty()) {
    std::uint32_t rate = static_cast<std::uint32_t>(audio[0].sample_rate_hz);
    w.Add(Record::FromU32("sample_rate", RecordKind::kMeta, 1, 1, std::span(&rate, 1)));
  }
  for (const auto &a : audio) {
    if (a.sample_rate_hz != audio[0].sample_rate_hz)
      throw ValidationError("audio archive: mixed sample rates");
    Matrix m(a.samples.size(), 1, a.samples);
    w.Add(Record::FromMatrix(a.utt_id, RecordKind::kAudio, m, DType::kF32));
  }
  w.Commit();
}

AudioSegment LoadAudio(const Archive &archive, const std::string &utt_id) {
  AudioSegment a;
  a.utt_id = utt_id;
  a.sample_rate_hz =
      static_cast<int>(archive.Require("sample_rate", RecordKind::kMeta).ToU32().at(0));
  Matrix m = archive.Require(utt_id, RecordKind::kAudio).ToMatrix();
  a.samples.assign(m.Values().begin(), m.Values().end());
  return a;
}

std::vector<Record> NetRecords(const BlockSoftmaxNet &net) {
  const NetSpec &s = net.spec();
  nlohmann::ordered_json j;
  j["feat_dim"] = s.feat_dim;
  j["hidden_dim"] = s.hidden_dim;
  j["num_hidden"] = s.num_hidden;
  j["contexts"] = s.contexts;
  j["bottleneck_dim"] = s.bottleneck_dim;
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto &b : s.blocks) blocks.push_back({b.lang, b.size});
  j["blocks"] = blocks;
  j["seed"] = s.seed;
  const std::string text = j.dump();
  std::vector<std::uint32_t> words(1 + (text.size() + 3) / 4, 0);
  words[0] = static_cast<std::uint32_t>(text.size());
  std::memcpy(words.data() + 1, text.data(), text.size());

  std::vector<double> flat(net.input_shift());
  flat.insert(flat.end(), net.input_scale().begin(), net.input_scale().end());
  for (const Matrix *m : net.Params()) flat.insert(flat.end(), m->Values().begin(), m->Values().end());
  return {Record::FromU32("spec", RecordKind::kNetSpec, 1,
                          static_cast<std::uint32_t>(words.size()), words),
          Record::FromMatrix("params", RecordKind::kNetParams, Matrix(1, flat.size(), flat))};
}

BlockSoftmaxNet NetFromArchive(const Archive &archive) {
  std::vector<std::uint32_t> words = archive.Require("spec", RecordKind::kNetSpec).ToU32();
  if (words.empty() || (words[0] + 3) / 4 + 1 != words.size())
    throw IntegrityError("net spec record has inconsistent length");
  std::string text(words[0], '\0');
  std::memcpy(text.data(), words.data() + 1, text.size());
  NetSpec s;
  try {
    auto j = nlohmann::json::parse(text);
    s.feat_dim = j.at("feat_dim");
    s.hidden_dim = j.at("hidden_dim");
    s.num_hidden = j.at("num_hidden");
    s.contexts = j.at("contexts").get<std::vector<std::vector<int>>>();
    s.bottleneck_dim = j.at("bottleneck_dim");
    for (const auto &b : j.at("blocks")) s.blocks.push_back({b.at(0), b.at(1)});
    s.seed = j.at("seed");
  } catch (const nlohmann::json::exception &e) {
    throw IntegrityError(std::string("net spec record: ") + e.what());
  }
  BlockSoftmaxNet net(s);
  Matrix flat = archive.Require("params", RecordKind::kNetParams).ToMatrix();
  const std::size_t in = net.input_shift().size();
  if (flat.Size() != 2 * in + net.NumParams())
    throw IntegrityError("net params record has " + std::to_string(flat.Size()) +
                         " values, spec needs " + std::to_string(2 * in + net.NumParams()));
  const double *p = flat.Data();
  std::copy_n(p, in, net.input_shift().begin());
  std::copy_n(p + in, in, net.input_scale().begin());
  p += 2 * in;
  for (Matrix *m : net.Params()) {
    std::copy_n(p, m->Size(), m->Data());
    p += m->Size();
  }
  return net;
}

}  // namespace mbnf
