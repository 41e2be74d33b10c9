// src/gmm/ivector.cc

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

#include "mbnf/gmm/ivector.h"

#include <Eigen/Dense>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/base/parallel.h"
#include "mbnf/base/rng.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {
namespace {

using EMat = Eigen::MatrixXd;
using EVec = Eigen::VectorXd;
using RowMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                              Eigen::RowMajor>>;

// Per-component quantities that do not depend on the utterance.
struct TvCache {
  int c = 0, d = 0, r = 0;
  std::vector<EMat> t;       // T_c, D x R
  std::vector<EMat> t_sinv;  // T_c' Sigma_c^-1, R x D
  std::vector<EMat> quad;    // T_c' Sigma_c^-1 T_c, R x R
};

TvCache MakeCache(const DiagGmm &ubm, const Matrix &t) {
  TvCache k;
  k.c = ubm.NumComp();
  k.d = ubm.Dim();
  k.r = static_cast<int>(t.NumCols());
  RowMap tm(t.Data(), t.NumRows(), t.NumCols());
  for (int c = 0; c < k.c; c++) {
    EMat tc = tm.block(c * k.d, 0, k.d, k.r);
    EVec inv(k.d);
    for (int e = 0; e < k.d; e++) inv(e) = ubm.inv_vars()(c, e);
    EMat ts = tc.transpose() * inv.asDiagonal();
    k.quad.push_back(ts * tc);
    k.t_sinv.push_back(std::move(ts));
    k.t.push_back(std::move(tc));
  }
  return k;
}

struct Posterior {
  EVec mean;
  EMat precision;
  EVec linear;
  EMat cov;  // L^-1
  double aux = 0.0;
};

Posterior Solve(const TvCache &k, const BwStats &s, bool want_cov) {
  Posterior p;
  p.precision = EMat::Identity(k.r, k.r);
  p.linear = EVec::Zero(k.r);
  for (int c = 0; c < k.c; c++) {
    if (s.zeroth[c] != 0.0) p.precision += s.zeroth[c] * k.quad[c];
    Eigen::Map<const EVec> f(s.first.Row(c).data(), k.d);
    p.linear += k.t_sinv[c] * f;
  }
  Eigen::LLT<EMat> llt(p.precision);
  if (llt.info() != Eigen::Success) throw InternalError("i-vector precision not SPD");
  p.mean = llt.solve(p.linear);
  double logdet = 0.0;
  EMat l = llt.matrixL();
  for (int i = 0; i < k.r; i++) logdet += 2.0 * std::log(l(i, i));
  p.aux = 0.5 * p.linear.dot(p.mean) - 0.5 * logdet;
  if (want_cov) p.cov = llt.solve(EMat::Identity(k.r, k.r));
  return p;
}

void CheckStats(const DiagGmm &ubm, const BwStats &s) {
  if (s.zeroth.size() != static_cast<std::size_t>(ubm.NumComp()) ||
      s.first.NumRows() != static_cast<std::size_t>(ubm.NumComp()) ||
      s.first.NumCols() != static_cast<std::size_t>(ubm.Dim()))
    throw DimensionError("BwStats shape does not match the UBM");
}

}  // namespace

void BwStats::Merge(const BwStats &other) {
  if (zeroth.size() != other.zeroth.size() || first.NumCols() != other.first.NumCols())
    throw DimensionError("BwStats::Merge: shape mismatch");
  for (std::size_t c = 0; c < zeroth.size(); c++) zeroth[c] += other.zeroth[c];
  kernels::Axpy(1.0, other.first.Values(), first.Values());
  total_frames += other.total_frames;
}

BwStats AccumulateBwStats(const DiagGmm &ubm, const Matrix &feats) {
  const int c = ubm.NumComp(), d = ubm.Dim();
  BwStats s(c, d);
  if (feats.NumRows() == 0) return s;
  if (feats.NumCols() != static_cast<std::size_t>(d))
    throw DimensionError("AccumulateBwStats: feature dim " +
                         std::to_string(feats.NumCols()) + " != UBM dim " +
                         std::to_string(d));
  std::vector<double> post(c), diff(d);
  for (std::size_t t = 0; t < feats.NumRows(); t++) {
    auto x = feats.Row(t);
    ubm.Posteriors(x, post);
    for (int j = 0; j < c; j++) {
      if (post[j] == 0.0) continue;
      s.zeroth[j] += post[j];
      for (int e = 0; e < d; e++) diff[e] = x[e] - ubm.means()(j, e);
      kernels::Axpy(post[j], diff, s.first.Row(j));
    }
  }
  s.total_frames = static_cast<double>(feats.NumRows());
  return s;
}

TMatrixResult TrainTMatrix(const DiagGmm &ubm, const std::vector<BwStats> &stats,
                           const TMatrixOptions &opts) {
  const int c = ubm.NumComp(), d = ubm.Dim(), r = opts.ivec_dim;
  if (r < 1) throw ConfigError("ivec_dim must be >= 1");
  if (r >= c * d)
    throw ConfigError("ivec_dim " + std::to_string(r) + " must be below C*D = " +
                      std::to_string(c * d));
  if (stats.size() < 2)
    throw DataError("T-matrix training needs at least 2 utterances, got " +
                    std::to_string(stats.size()));
  for (const auto &s : stats) CheckStats(ubm, s);

  TMatrixResult res;
  res.model.ubm = ubm;
  res.model.t.Resize(static_cast<std::size_t>(c) * d, r);
  Rng rng(SubSeed(opts.seed, 0x7476));
  for (double &v : res.model.t.Values()) v = opts.init_scale * rng.Gauss();

  const std::size_t n = stats.size();
  for (int it = 0; it <= opts.iters; it++) {
    TvCache k = MakeCache(ubm, res.model.t);
    const bool last = it == opts.iters;
    std::vector<Posterior> post(n);
    ParallelFor(n, opts.num_jobs,
                [&](std::size_t u) { post[u] = Solve(k, stats[u], !last); });
    double obj = 0.0;
    for (const auto &p : post) obj += p.aux;
    res.objective.push_back(obj);
    if (last) break;

    // A_c = sum_u N_c E[w w'], C_c = sum_u F_c E[w]'; summed serially.
    std::vector<EMat> a(c, EMat::Zero(r, r));
    std::vector<EMat> cc(c, EMat::Zero(d, r));
    for (std::size_t u = 0; u < n; u++) {
      EMat ww = post[u].cov + post[u].mean * post[u].mean.transpose();
      for (int j = 0; j < c; j++) {
        if (stats[u].zeroth[j] != 0.0) a[j] += stats[u].zeroth[j] * ww;
        Eigen::Map<const EVec> f(stats[u].first.Row(j).data(), d);
        cc[j] += f * post[u].mean.transpose();
      }
    }
    for (int j = 0; j < c; j++) {
      Eigen::LLT<EMat> llt(a[j]);
      if (llt.info() != Eigen::Success) continue;  // component never occupied
      EMat tj = llt.solve(cc[j].transpose()).transpose();  // C_c A_c^-1
      for (int e = 0; e < d; e++)
        for (int q = 0; q < r; q++) res.model.t(j * d + e, q) = tj(e, q);
    }
  }
  return res;
}

IvectorPosterior ComputeIvectorPosterior(const TvModel &model, const BwStats &stats) {
  CheckStats(model.ubm, stats);
  if (model.t.NumRows() !=
      static_cast<std::size_t>(model.ubm.NumComp()) * model.ubm.Dim())
    throw DimensionError("T-matrix rows do not match the UBM");
  TvCache k = MakeCache(model.ubm, model.t);
  Posterior p = Solve(k, stats, false);
  IvectorPosterior out;
  out.mean.assign(p.mean.data(), p.mean.data() + k.r);
  out.linear.assign(p.linear.data(), p.linear.data() + k.r);
  out.precision.Resize(k.r, k.r);
  for (int i = 0; i < k.r; i++)
    for (int j = 0; j < k.r; j++) out.precision(i, j) = p.precision(i, j);
  return out;
}

std::vector<double> ExtractIvector(const TvModel &model, const Matrix &feats) {
  return ComputeIvectorPosterior(model, AccumulateBwStats(model.ubm, feats)).mean;
}

}  // namespace mbnf
