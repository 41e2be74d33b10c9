// tests/oracle/nnet-oracle.h

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

#ifndef MBNF_TESTS_ORACLE_NNET_ORACLE_H_
#define MBNF_TESTS_ORACLE_NNET_ORACLE_H_

#include <algorithm>
#include <cmath>

#include "mbnf/nnet/block-softmax-net.h"
#include "mbnf/nnet/nnet-train.h"

namespace mbnf::oracle {

// Central-difference derivative of the batch loss for every parameter,
// compared with the analytic gradient: max over parameters of
// |a - n| / max(|a|, |n|, floor).
inline double MaxGradientRelError(const BlockSoftmaxNet &net, const BlockSoftmaxNet &grad,
                                  const TrainBatch &batch, double eps,
                                  double floor = 1e-8) {
  BlockSoftmaxNet work = net;
  auto params = work.Params();
  auto g = grad.Params();
  double worst = 0.0;
  for (std::size_t m = 0; m < params.size(); m++)
    for (std::size_t i = 0; i < params[m]->Size(); i++) {
      double &w = params[m]->Data()[i];
      const double saved = w;
      w = saved + eps;
      double plus = ComputeLoss(work, batch);
      w = saved - eps;
      double minus = ComputeLoss(work, batch);
      w = saved;
      double numeric = (plus - minus) / (2.0 * eps);
      double analytic = g[m]->Data()[i];
      double denom = std::max({std::fabs(analytic), std::fabs(numeric), floor});
      worst = std::max(worst, std::fabs(analytic - numeric) / denom);
    }
  return worst;
}

}  // namespace mbnf::oracle

#endif  // MBNF_TESTS_ORACLE_NNET_ORACLE_H_
