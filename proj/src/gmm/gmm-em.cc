// src/gmm/gmm-em.cc

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

#include "mbnf/gmm/gmm-em.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/base/logging.h"
#include "mbnf/base/parallel.h"
#include "mbnf/base/rng.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {
namespace {

constexpr double kStarvedOccupancy = 1e-8;
// Frames per accumulation chunk. Fixed so that sums do not depend on the
// number of jobs.
constexpr std::size_t kChunk = 512;

struct FrameRef {
  const Matrix *m;
  std::size_t row;
  std::span<const double> Get() const { return m->Row(row); }
};

std::vector<FrameRef> Flatten(const FrameSet &frames) {
  std::vector<FrameRef> out;
  out.reserve(TotalFrames(frames));
  for (const Matrix *m : frames)
    for (std::size_t r = 0; r < m->NumRows(); r++) out.push_back({m, r});
  return out;
}

std::size_t CheckDims(const FrameSet &frames) {
  std::size_t dim = 0;
  for (const Matrix *m : frames) {
    if (m->NumRows() == 0) continue;
    if (dim == 0) dim = m->NumCols();
    if (m->NumCols() != dim) throw DimensionError("GMM: frame matrices differ in dim");
  }
  return dim;
}

struct EmAccs {
  double loglik = 0.0;
  std::vector<double> occ;
  Matrix sum;  // sum_t gamma_tc x_t

  EmAccs(std::size_t c, std::size_t d) : occ(c, 0.0), sum(c, d) {}
  void Add(const EmAccs &o) {
    loglik += o.loglik;
    for (std::size_t i = 0; i < occ.size(); i++) occ[i] += o.occ[i];
    kernels::Axpy(1.0, o.sum.Values(), sum.Values());
  }
};

// One E-step pass; when pass2 is given, accumulates sum_t gamma_tc (x_t - m_c)^2
// against the new means m_c instead of first-order sums.
EmAccs Accumulate(const DiagGmm &gmm, const std::vector<FrameRef> &flat, int num_jobs,
                  const Matrix *new_means) {
  const std::size_t c = gmm.NumComp(), d = gmm.Dim();
  const std::size_t chunks = (flat.size() + kChunk - 1) / kChunk;
  std::vector<EmAccs> parts(chunks, EmAccs(c, d));
  ParallelFor(chunks, num_jobs, [&](std::size_t k) {
    EmAccs &acc = parts[k];
    std::vector<double> post(c), diff(d);
    const std::size_t end = std::min(flat.size(), (k + 1) * kChunk);
    for (std::size_t i = k * kChunk; i < end; i++) {
      auto x = flat[i].Get();
      acc.loglik += gmm.Posteriors(x, post);
      for (std::size_t j = 0; j < c; j++) {
        if (post[j] == 0.0) continue;
        acc.occ[j] += post[j];
        if (new_means) {
          for (std::size_t e = 0; e < d; e++) {
            double v = x[e] - (*new_means)(j, e);
            diff[e] = v * v;
          }
          kernels::Axpy(post[j], diff, acc.sum.Row(j));
        } else {
          kernels::Axpy(post[j], x, acc.sum.Row(j));
        }
      }
    }
  });
  EmAccs total(c, d);
  for (const auto &p : parts) total.Add(p);
  return total;
}

// Replaces component `starved` by half of the heaviest component, offsetting
// the two means by +-0.2 standard deviations.
void SplitInto(std::vector<double> *w, Matrix *means, Matrix *vars, std::size_t starved) {
  std::size_t heavy = std::max_element(w->begin(), w->end()) - w->begin();
  (*w)[heavy] *= 0.5;
  (*w)[starved] = (*w)[heavy];
  for (std::size_t e = 0; e < means->NumCols(); e++) {
    double off = 0.2 * std::sqrt((*vars)(heavy, e));
    (*means)(starved, e) = (*means)(heavy, e) + off;
    (*means)(heavy, e) -= off;
    (*vars)(starved, e) = (*vars)(heavy, e);
  }
}

GmmEmResult RunEm(DiagGmm gmm, const std::vector<FrameRef> &flat,
                  const GmmEmOptions &opts) {
  GmmEmResult res;
  const std::size_t c = gmm.NumComp(), d = gmm.Dim();
  for (int it = 0; it < opts.iters; it++) {
    EmAccs acc = Accumulate(gmm, flat, opts.num_jobs, nullptr);
    res.loglik.push_back(acc.loglik);
    const double total = static_cast<double>(flat.size());
    std::vector<double> w(c);
    Matrix means = gmm.means(), vars = gmm.vars();
    std::vector<std::size_t> starved;
    for (std::size_t j = 0; j < c; j++) {
      w[j] = acc.occ[j] / total;
      if (acc.occ[j] < kStarvedOccupancy) {
        starved.push_back(j);
        continue;
      }
      for (std::size_t e = 0; e < d; e++) means(j, e) = acc.sum(j, e) / acc.occ[j];
    }
    // Second pass for variances around the updated means.
    EmAccs sq = Accumulate(gmm, flat, opts.num_jobs, &means);
    for (std::size_t j = 0; j < c; j++) {
      if (acc.occ[j] < kStarvedOccupancy) continue;
      for (std::size_t e = 0; e < d; e++)
        vars(j, e) = std::max(sq.sum(j, e) / acc.occ[j], opts.var_floor);
    }
    if (opts.reinit_starved && !starved.empty()) {
      for (std::size_t j : starved) {
        Log().info("GMM EM iteration {}: component {} starved (occupancy {:.3g}), "
                   "re-seeding from the heaviest component", it, j, acc.occ[j]);
        SplitInto(&w, &means, &vars, j);
      }
      res.reinit_iters.push_back(it);
    }
    double wsum = 0.0;
    for (double v : w) wsum += v;
    for (double &v : w) v /= wsum;
    gmm.SetParams(std::move(w), std::move(means), std::move(vars));
  }
  res.loglik.push_back(Accumulate(gmm, flat, opts.num_jobs, nullptr).loglik);
  res.gmm = std::move(gmm);
  return res;
}

}  // namespace

std::size_t TotalFrames(const FrameSet &frames) {
  std::size_t n = 0;
  for (const Matrix *m : frames) n += m->NumRows();
  return n;
}

DiagGmm KMeansInitGmm(const FrameSet &frames, const GmmEmOptions &opts) {
  const std::size_t dim = CheckDims(frames);
  std::vector<FrameRef> flat = Flatten(frames);
  if (flat.empty()) throw DataError("GMM: no frames");
  if (opts.num_comp < 1) throw ConfigError("GMM: num_comp must be >= 1");
  const std::size_t c = opts.num_comp;
  if (flat.size() < c)
    throw DataError("GMM: " + std::to_string(flat.size()) + " frames for " +
                    std::to_string(c) + " components");
  Rng rng(SubSeed(opts.seed, 0x6b6d));

  // Subsample without replacement (partial Fisher-Yates over indices).
  std::vector<std::size_t> idx(flat.size());
  for (std::size_t i = 0; i < idx.size(); i++) idx[i] = i;
  std::size_t n = std::min(flat.size(), std::max(opts.max_init_frames, c));
  if (n < flat.size()) {
    for (std::size_t i = 0; i < n; i++) {
      std::size_t j = i + std::uniform_int_distribution<std::size_t>(
                              0, idx.size() - 1 - i)(rng.engine());
      std::swap(idx[i], idx[j]);
    }
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
  }

  auto sq_dist = [&](std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t e = 0; e < dim; e++) s += (a[e] - b[e]) * (a[e] - b[e]);
    return s;
  };

  // k-means++ seeding.
  Matrix centers(c, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng.engine());
  std::copy_n(flat[idx[first]].Get().begin(), dim, centers.Row(0).begin());
  for (std::size_t k = 1; k < c; k++) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; i++) {
      d2[i] = std::min(d2[i], sq_dist(flat[idx[i]].Get(), centers.Row(k - 1)));
      total += d2[i];
    }
    std::size_t pick = n - 1;
    if (total > 0.0) {
      double r = rng.Uniform() * total;
      for (std::size_t i = 0; i < n; i++) {
        r -= d2[i];
        if (r < 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng.engine());
    }
    std::copy_n(flat[idx[pick]].Get().begin(), dim, centers.Row(k).begin());
  }

  auto nearest = [&](std::span<const double> x) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c; k++) {
      double dd = sq_dist(x, centers.Row(k));
      if (dd < best_d) best_d = dd, best = k;
    }
    return best;
  };

  // Lloyd iterations on the subsample.
  for (int it = 0; it < opts.kmeans_iters; it++) {
    Matrix sums(c, dim);
    std::vector<std::size_t> counts(c, 0);
    for (std::size_t i = 0; i < n; i++) {
      auto x = flat[idx[i]].Get();
      std::size_t k = nearest(x);
      counts[k]++;
      kernels::Axpy(1.0, x, sums.Row(k));
    }
    for (std::size_t k = 0; k < c; k++)
      if (counts[k] > 0)
        for (std::size_t e = 0; e < dim; e++) centers(k, e) = sums(k, e) / counts[k];
  }

  // Hard assignment of every frame; two-pass moments.
  std::vector<std::size_t> assign(flat.size());
  std::vector<double> counts(c, 0.0);
  Matrix means(c, dim), vars(c, dim);
  std::vector<double> global_mean(dim, 0.0), global_var(dim, 0.0);
  for (std::size_t i = 0; i < flat.size(); i++) {
    auto x = flat[i].Get();
    assign[i] = nearest(x);
    counts[assign[i]] += 1.0;
    kernels::Axpy(1.0, x, means.Row(assign[i]));
    kernels::Axpy(1.0, x, global_mean);
  }
  for (double &v : global_mean) v /= flat.size();
  for (std::size_t k = 0; k < c; k++)
    for (std::size_t e = 0; e < dim; e++)
      means(k, e) = counts[k] > 0 ? means(k, e) / counts[k] : centers(k, e);
  for (std::size_t i = 0; i < flat.size(); i++) {
    auto x = flat[i].Get();
    for (std::size_t e = 0; e < dim; e++) {
      double v = x[e] - means(assign[i], e);
      vars(assign[i], e) += v * v;
      double g = x[e] - global_mean[e];
      global_var[e] += g * g;
    }
  }
  std::vector<double> weights(c);
  double wsum = 0.0;
  for (std::size_t k = 0; k < c; k++) {
    for (std::size_t e = 0; e < dim; e++) {
      double v = counts[k] > 0 ? vars(k, e) / counts[k] : global_var[e] / flat.size();
      vars(k, e) = std::max(v, opts.var_floor);
    }
    weights[k] = std::max(counts[k], 1.0);
    wsum += weights[k];
  }
  for (double &w : weights) w /= wsum;
  return DiagGmm(std::move(weights), std::move(means), std::move(vars));
}

GmmEmResult EmFitGmm(const FrameSet &frames, const GmmEmOptions &opts) {
  DiagGmm init = KMeansInitGmm(frames, opts);
  return RunEm(std::move(init), Flatten(frames), opts);
}

GmmEmResult EmUpdateGmm(const DiagGmm &gmm, const FrameSet &frames,
                        const GmmEmOptions &opts) {
  std::size_t dim = CheckDims(frames);
  if (TotalFrames(frames) == 0) throw DataError("GMM: no frames");
  if (dim != static_cast<std::size_t>(gmm.Dim()))
    throw DimensionError("GMM: frame dim differs from model dim");
  return RunEm(gmm, Flatten(frames), opts);
}

double TotalLogLik(const DiagGmm &gmm, const FrameSet &frames, int num_jobs) {
  return Accumulate(gmm, Flatten(frames), num_jobs, nullptr).loglik;
}

}  // namespace mbnf
