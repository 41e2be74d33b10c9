// src/nnet/block-softmax-net.cc

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

#include "mbnf/nnet/block-softmax-net.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/base/rng.h"
#include "mbnf/kernels/kernels.h"
#include "tdnn-ops.h"

namespace mbnf {

std::vector<std::vector<int>> NetSpec::DefaultContexts(int num_hidden) {
  std::vector<std::vector<int>> c;
  for (int k = 0; k < num_hidden; k++) {
    if (k == 0)
      c.push_back({-2, -1, 0, 1, 2});
    else if (k < 3)
      c.push_back({-1, 0, 1});
    else
      c.push_back({0});
  }
  return c;
}

int NetSpec::InnerLeftContext() const {
  int n = 0;
  for (std::size_t k = 1; k < contexts.size(); k++) n -= contexts[k].front();
  return n;
}

int NetSpec::InnerRightContext() const {
  int n = 0;
  for (std::size_t k = 1; k < contexts.size(); k++) n += contexts[k].back();
  return n;
}

int NetSpec::LeftContext() const { return InnerLeftContext() - contexts.at(0).front(); }
int NetSpec::RightContext() const { return InnerRightContext() + contexts.at(0).back(); }

int NetSpec::BlockIndex(const std::string &lang) const {
  for (std::size_t b = 0; b < blocks.size(); b++)
    if (blocks[b].lang == lang) return static_cast<int>(b);
  return -1;
}

void NetSpec::Validate() const {
  if (feat_dim < 1 || hidden_dim < 1 || num_hidden < 1 || bottleneck_dim < 1)
    throw ConfigError("net spec: feat_dim, hidden_dim, num_hidden and "
                      "bottleneck_dim must be >= 1");
  if (contexts.size() != static_cast<std::size_t>(num_hidden))
    throw ConfigError("net spec: need one context list per hidden layer (" +
                      std::to_string(num_hidden) + "), got " +
                      std::to_string(contexts.size()));
  for (const auto &c : contexts) {
    if (c.empty()) throw ConfigError("net spec: empty context list");
    for (std::size_t i = 1; i < c.size(); i++)
      if (c[i] <= c[i - 1])
        throw ConfigError("net spec: context offsets must be sorted and unique");
    if (c.front() > 0 || c.back() < 0)
      throw ConfigError("net spec: context offsets must include frame 0's span");
  }
  if (blocks.empty()) throw ConfigError("net spec: no output blocks");
  for (std::size_t b = 0; b < blocks.size(); b++) {
    if (blocks[b].size < 1)
      throw ConfigError("net spec: block '" + blocks[b].lang + "' has size < 1");
    if (BlockIndex(blocks[b].lang) != static_cast<int>(b))
      throw ConfigError("net spec: duplicate block '" + blocks[b].lang + "'");
  }
}

namespace {

AffineParams HeInit(int out, int in, Rng &rng) {
  AffineParams p{Matrix(out, in), Matrix(1, out)};
  const double sd = std::sqrt(2.0 / in);
  for (double &w : p.weight.Values()) w = sd * rng.Gauss();
  return p;
}

}  // namespace

BlockSoftmaxNet::BlockSoftmaxNet(const NetSpec &spec) : spec_(spec) {
  spec_.Validate();
  Rng rng(SubSeed(spec_.seed, 0x6e6574));
  const int in = spec_.InputDim();
  input_shift_.assign(in, 0.0);
  input_scale_.assign(in, 1.0);
  for (int k = 0; k < spec_.num_hidden; k++) {
    int fan_in = k == 0 ? in
                        : spec_.hidden_dim * static_cast<int>(spec_.contexts[k].size());
    hidden_.push_back(HeInit(spec_.hidden_dim, fan_in, rng));
  }
  bottleneck_ = HeInit(spec_.bottleneck_dim, spec_.hidden_dim, rng);
  for (const auto &b : spec_.blocks) outputs_.push_back(HeInit(b.size, spec_.bottleneck_dim, rng));
}

void BlockSoftmaxNet::SetInputNormalization(std::span<const double> mean,
                                            std::span<const double> stddev) {
  if (mean.size() != static_cast<std::size_t>(spec_.feat_dim) ||
      stddev.size() != mean.size())
    throw DimensionError("input normalization: expected " +
                         std::to_string(spec_.feat_dim) + " statistics");
  const std::size_t n = spec_.contexts[0].size();
  for (std::size_t o = 0; o < n; o++)
    for (std::size_t d = 0; d < mean.size(); d++) {
      input_shift_[o * mean.size() + d] = mean[d];
      input_scale_[o * mean.size() + d] = stddev[d] > 1e-8 ? 1.0 / stddev[d] : 1.0;
    }
}

std::vector<Matrix *> BlockSoftmaxNet::Params() {
  std::vector<Matrix *> out;
  for (auto &h : hidden_) out.insert(out.end(), {&h.weight, &h.bias});
  out.insert(out.end(), {&bottleneck_.weight, &bottleneck_.bias});
  for (auto &b : outputs_) out.insert(out.end(), {&b.weight, &b.bias});
  return out;
}

std::vector<const Matrix *> BlockSoftmaxNet::Params() const {
  std::vector<const Matrix *> out;
  for (auto *m : const_cast<BlockSoftmaxNet *>(this)->Params()) out.push_back(m);
  return out;
}

std::size_t BlockSoftmaxNet::NumParams() const {
  std::size_t n = 0;
  for (const Matrix *m : Params()) n += m->Size();
  return n;
}

void BlockSoftmaxNet::SetZero() {
  for (Matrix *m : Params()) m->SetZero();
}

bool BlockSoftmaxNet::IsFinite() const {
  for (const Matrix *m : Params())
    if (!m->IsFinite()) return false;
  return true;
}

bool BlockSoftmaxNet::operator==(const BlockSoftmaxNet &o) const {
  if (!(spec_ == o.spec_) || input_shift_ != o.input_shift_ ||
      input_scale_ != o.input_scale_)
    return false;
  auto a = Params(), b = o.Params();
  for (std::size_t i = 0; i < a.size(); i++)
    if (!(*a[i] == *b[i])) return false;
  return true;
}

void SoftmaxRows(Matrix *m) {
  for (std::size_t r = 0; r < m->NumRows(); r++) {
    auto row = m->Row(r);
    double max = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double &v : row) sum += (v = std::exp(v - max));
    for (double &v : row) v /= sum;
  }
}

void BlockSoftmaxNet::Forward(const Matrix &input, int block, Matrix *bottleneck,
                              std::vector<Matrix> *posteriors) const {
  internal::ForwardCache cache;
  internal::ForwardWithCache(*this, input, &cache);
  if (posteriors) {
    posteriors->assign(outputs_.size(), Matrix());
    for (std::size_t b = 0; b < outputs_.size(); b++) {
      if (block >= 0 && static_cast<std::size_t>(block) != b) continue;
      internal::AffineForward(outputs_[b], cache.bottleneck, &(*posteriors)[b]);
      SoftmaxRows(&(*posteriors)[b]);
    }
  }
  if (bottleneck) *bottleneck = std::move(cache.bottleneck);
}

Matrix SpliceRange(const Matrix &feats, std::span<const int> offsets, long begin,
                   long end) {
  if (feats.NumRows() == 0) throw DataError("splice: no frames");
  const long last = static_cast<long>(feats.NumRows()) - 1;
  const std::size_t d = feats.NumCols();
  Matrix out(static_cast<std::size_t>(std::max(0L, end - begin)), d * offsets.size());
  for (long t = begin; t < end; t++) {
    auto row = out.Row(static_cast<std::size_t>(t - begin));
    for (std::size_t o = 0; o < offsets.size(); o++) {
      auto src = feats.Row(static_cast<std::size_t>(std::clamp(t + offsets[o], 0L, last)));
      std::copy(src.begin(), src.end(), row.begin() + o * d);
    }
  }
  return out;
}

Matrix Splice(const Matrix &feats, std::span<const int> offsets) {
  return SpliceRange(feats, offsets, 0, static_cast<long>(feats.NumRows()));
}

Matrix NetInputFor(const NetSpec &spec, const Matrix &feats, long begin, long end) {
  if (feats.NumCols() != static_cast<std::size_t>(spec.feat_dim))
    throw DimensionError("net input: feature dim " + std::to_string(feats.NumCols()) +
                         " != " + std::to_string(spec.feat_dim));
  return SpliceRange(feats, spec.contexts[0], begin - spec.InnerLeftContext(),
                     end + spec.InnerRightContext());
}

namespace internal {

Matrix SpliceValid(const Matrix &in, std::span<const int> offsets) {
  const long span = offsets.back() - offsets.front();
  const long rows = static_cast<long>(in.NumRows()) - span;
  if (rows <= 0) throw DimensionError("TDNN: chunk shorter than the layer context");
  const std::size_t d = in.NumCols();
  Matrix out(rows, d * offsets.size());
  for (long r = 0; r < rows; r++)
    for (std::size_t o = 0; o < offsets.size(); o++) {
      auto src = in.Row(static_cast<std::size_t>(r - offsets.front() + offsets[o]));
      std::copy(src.begin(), src.end(), out.Row(r).begin() + o * d);
    }
  return out;
}

void UnspliceAdd(const Matrix &d_out, std::span<const int> offsets, Matrix *d_in) {
  const std::size_t d = d_in->NumCols();
  for (std::size_t r = 0; r < d_out.NumRows(); r++)
    for (std::size_t o = 0; o < offsets.size(); o++) {
      auto src = d_out.Row(r).subspan(o * d, d);
      kernels::Axpy(1.0, src, d_in->Row(r - offsets.front() + offsets[o]));
    }
}

void AffineForward(const AffineParams &p, const Matrix &in, Matrix *out) {
  if (in.NumCols() != p.weight.NumCols())
    throw DimensionError("affine: input dim " + std::to_string(in.NumCols()) +
                         " != " + std::to_string(p.weight.NumCols()));
  kernels::GemmNT(in, p.weight, out);
  for (std::size_t r = 0; r < out->NumRows(); r++)
    kernels::Axpy(1.0, p.bias.Row(0), out->Row(r));
}

void ForwardWithCache(const BlockSoftmaxNet &net, const Matrix &input, ForwardCache *c) {
  const NetSpec &spec = net.spec();
  if (input.NumCols() != static_cast<std::size_t>(spec.InputDim()))
    throw DimensionError("net input dim " + std::to_string(input.NumCols()) +
                         " != " + std::to_string(spec.InputDim()));
  c->input = input;
  for (std::size_t r = 0; r < input.NumRows(); r++) {
    auto row = c->input.Row(r);
    for (std::size_t j = 0; j < row.size(); j++)
      row[j] = (row[j] - net.input_shift()[j]) * net.input_scale()[j];
  }
  const int layers = spec.num_hidden;
  c->spliced.resize(layers);
  c->pre.resize(layers);
  c->act.resize(layers);
  const kernels::KernelTable &kt = kernels::Active();
  for (int k = 0; k < layers; k++) {
    const Matrix &prev = k == 0 ? c->input : c->act[k - 1];
    if (k == 0)
      c->spliced[k] = Matrix();
    else
      c->spliced[k] = SpliceValid(prev, spec.contexts[k]);
    const Matrix &in = k == 0 ? c->input : c->spliced[k];
    AffineForward(net.hidden()[k], in, &c->pre[k]);
    c->act[k].Resize(c->pre[k].NumRows(), c->pre[k].NumCols());
    kt.relu(c->pre[k].Data(), c->act[k].Data(), c->pre[k].Size());
  }
  AffineForward(net.bottleneck(), c->act[layers - 1], &c->bottleneck);
}

}  // namespace internal
}  // namespace mbnf
