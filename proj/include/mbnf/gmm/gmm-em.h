// include/mbnf/gmm/gmm-em.h

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

#ifndef MBNF_GMM_GMM_EM_H_
#define MBNF_GMM_GMM_EM_H_

#include <cstdint>
#include <vector>

#include "mbnf/base/matrix.h"
#include "mbnf/gmm/diag-gmm.h"

namespace mbnf {

struct GmmEmOptions {
  int num_comp = 8;
  int iters = 10;
  std::uint64_t seed = 0;
  double var_floor = DiagGmm::kDefaultVarFloor;
  // k-means++ seeding and Lloyd refinement run on at most this many frames.
  std::size_t max_init_frames = 5000;
  int kmeans_iters = 5;
  // Components whose occupancy falls below 1e-8 are re-seeded by splitting
  // the heaviest component. When false they keep their parameters instead.
  bool reinit_starved = true;
  int num_jobs = 1;
};

struct GmmEmResult {
  DiagGmm gmm;
  // Total log-likelihood of all frames under the model before each EM
  // iteration and after the last one: iters + 1 entries.
  std::vector<double> loglik;
  // Iterations (0-based) after which a starved component was re-seeded; the
  // step from loglik[i] to loglik[i + 1] is then not a pure EM step.
  std::vector<int> reinit_iters;
};

// A list of frame matrices that share a column count.
using FrameSet = std::vector<const Matrix *>;

std::size_t TotalFrames(const FrameSet &frames);

// k-means++ seeding and Lloyd iterations on a seeded subsample, then one hard
// assignment of every frame to form weights, means and floored variances.
DiagGmm KMeansInitGmm(const FrameSet &frames, const GmmEmOptions &opts);

// Fits a GMM from scratch: KMeansInitGmm followed by opts.iters EM steps.
GmmEmResult EmFitGmm(const FrameSet &frames, const GmmEmOptions &opts);

// opts.iters EM steps starting from gmm (num_comp and seed are unused unless a
// starved component must be re-seeded).
GmmEmResult EmUpdateGmm(const DiagGmm &gmm, const FrameSet &frames,
                        const GmmEmOptions &opts);

// Total log-likelihood of the frames, summed in a fixed order.
double TotalLogLik(const DiagGmm &gmm, const FrameSet &frames, int num_jobs = 1);

}  // namespace mbnf

#endif  // MBNF_GMM_GMM_EM_H_
