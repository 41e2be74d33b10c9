// src/gmm/diag-gmm.cc

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

#include "mbnf/gmm/diag-gmm.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf {

double LogSumExp(std::span<const double> v) {
  double max = -std::numeric_limits<double>::infinity();
  for (double x : v) max = std::max(max, x);
  if (!std::isfinite(max)) return max;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max);
  return max + std::log(sum);
}

DiagGmm::DiagGmm(std::vector<double> weights, Matrix means, Matrix vars) {
  SetParams(std::move(weights), std::move(means), std::move(vars));
}

void DiagGmm::SetParams(std::vector<double> weights, Matrix means, Matrix vars) {
  if (weights.empty() || means.NumRows() != weights.size() ||
      vars.NumRows() != weights.size() || vars.NumCols() != means.NumCols() ||
      means.NumCols() == 0)
    throw DimensionError("DiagGmm: inconsistent parameter shapes");
  weights_ = std::move(weights);
  means_ = std::move(means);
  vars_ = std::move(vars);
  const std::size_t c = weights_.size(), d = means_.NumCols();
  inv_vars_.Resize(c, d);
  gconsts_.assign(c, 0.0);
  for (std::size_t i = 0; i < c; i++) {
    double logdet = 0.0;
    for (std::size_t j = 0; j < d; j++) {
      if (!(vars_(i, j) > 0.0))
        throw ValidationError("DiagGmm: non-positive variance");
      inv_vars_(i, j) = 1.0 / vars_(i, j);
      logdet += std::log(vars_(i, j));
    }
    gconsts_[i] = weights_[i] > 0.0
                      ? std::log(weights_[i]) -
                            0.5 * (d * std::log(2.0 * std::numbers::pi) + logdet)
                      : -std::numeric_limits<double>::infinity();
  }
}

void DiagGmm::ComponentLogLiks(std::span<const double> x, std::span<double> out) const {
  if (x.size() != means_.NumCols())
    throw DimensionError("DiagGmm: input dim " + std::to_string(x.size()) +
                         " != model dim " + std::to_string(means_.NumCols()));
  for (std::size_t c = 0; c < weights_.size(); c++)
    out[c] = std::isfinite(gconsts_[c])
                 ? gconsts_[c] - 0.5 * kernels::WeightedSqDist(x, means_.Row(c),
                                                               inv_vars_.Row(c))
                 : gconsts_[c];
}

double DiagGmm::LogLik(std::span<const double> x) const {
  std::vector<double> ll(weights_.size());
  ComponentLogLiks(x, ll);
  return LogSumExp(ll);
}

double DiagGmm::Posteriors(std::span<const double> x, std::span<double> post) const {
  ComponentLogLiks(x, post);
  double total = LogSumExp(post);
  for (double &p : post) p = std::exp(p - total);
  return total;
}

void DiagGmm::Validate(double var_floor) const {
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ValidationError("DiagGmm: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ValidationError("DiagGmm: weights sum to " + std::to_string(sum));
  for (double v : vars_.Values())
    if (!(v >= var_floor)) throw ValidationError("DiagGmm: variance below floor");
  if (!means_.IsFinite()) throw ValidationError("DiagGmm: non-finite mean");
}

}  // namespace mbnf
