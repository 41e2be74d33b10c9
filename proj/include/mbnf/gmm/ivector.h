// include/mbnf/gmm/ivector.h

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

#ifndef MBNF_GMM_IVECTOR_H_
#define MBNF_GMM_IVECTOR_H_

#include <cstdint>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/gmm/diag-gmm.h"

namespace mbnf {

// Zeroth- and centered first-order Baum-Welch statistics of one utterance.
struct BwStats {
  std::vector<double> zeroth;  // N_c
  Matrix first;                // F_c = sum_t gamma_tc (x_t - mu_c), C x D
  double total_frames = 0.0;

  BwStats() = default;
  BwStats(int num_comp, int dim) : zeroth(num_comp, 0.0), first(num_comp, dim) {}
  void Merge(const BwStats &other);
};

BwStats AccumulateBwStats(const DiagGmm &ubm, const Matrix &feats);

// Total-variability model: supervector offset M = T w, with T stacked as
// C blocks of D rows.
struct TvModel {
  DiagGmm ubm;
  Matrix t;  // (C * D) x ivec_dim

  int IvecDim() const { return static_cast<int>(t.NumCols()); }
};

struct TMatrixOptions {
  int ivec_dim = 10;
  int iters = 5;
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  int num_jobs = 1;
};

struct TMatrixResult {
  TvModel model;
  // Auxiliary objective sum_u [0.5 b_u' L_u^-1 b_u - 0.5 log det L_u] (the
  // T-dependent part of the marginal log-likelihood) before each iteration and
  // after the last: iters + 1 entries.
  std::vector<double> objective;
};

TMatrixResult TrainTMatrix(const DiagGmm &ubm, const std::vector<BwStats> &stats,
                           const TMatrixOptions &opts);

// Posterior of w given one utterance's statistics.
struct IvectorPosterior {
  std::vector<double> mean;  // L^-1 b
  Matrix precision;          // L = I + sum_c N_c T_c' Sigma_c^-1 T_c
  std::vector<double> linear;  // b = sum_c T_c' Sigma_c^-1 F_c
};

IvectorPosterior ComputeIvectorPosterior(const TvModel &model, const BwStats &stats);

std::vector<double> ExtractIvector(const TvModel &model, const Matrix &feats);

}  // namespace mbnf

#endif  // MBNF_GMM_IVECTOR_H_
