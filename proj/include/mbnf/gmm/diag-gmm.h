// include/mbnf/gmm/diag-gmm.h

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

#ifndef MBNF_GMM_DIAG_GMM_H_
#define MBNF_GMM_DIAG_GMM_H_

#include <span>
#include <vector>

#include "mbnf/base/matrix.h"

namespace mbnf {

// Diagonal-covariance Gaussian mixture. Per-component normalizers are cached
// and refreshed by SetParams.
class DiagGmm {
 public:
  static constexpr double kDefaultVarFloor = 1e-3;

  DiagGmm() = default;
  DiagGmm(std::vector<double> weights, Matrix means, Matrix vars);

  void SetParams(std::vector<double> weights, Matrix means, Matrix vars);

  int NumComp() const { return static_cast<int>(weights_.size()); }
  int Dim() const { return static_cast<int>(means_.NumCols()); }
  const std::vector<double> &weights() const { return weights_; }
  const Matrix &means() const { return means_; }
  const Matrix &vars() const { return vars_; }
  const Matrix &inv_vars() const { return inv_vars_; }

  // log sum_c w_c N(x; mu_c, diag var_c), via log-sum-exp.
  double LogLik(std::span<const double> x) const;
  // log w_c + log N(x; mu_c, var_c) per component; -inf for zero weights.
  void ComponentLogLiks(std::span<const double> x, std::span<double> out) const;
  // Responsibilities into *post; returns LogLik(x).
  double Posteriors(std::span<const double> x, std::span<double> post) const;

  // Throws ValidationError unless weights form a simplex (1e-9) and every
  // variance is >= var_floor.
  void Validate(double var_floor = kDefaultVarFloor) const;

  bool operator==(const DiagGmm &other) const {
    return weights_ == other.weights_ && means_ == other.means_ && vars_ == other.vars_;
  }

 private:
  std::vector<double> weights_;
  Matrix means_;
  Matrix vars_;
  Matrix inv_vars_;
  std::vector<double> gconsts_;
};

// log(sum_i exp(v_i)); -inf when every entry is -inf.
double LogSumExp(std::span<const double> v);

}  // namespace mbnf

#endif  // MBNF_GMM_DIAG_GMM_H_
