// include/mbnf/kernels/kernels.h

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

#ifndef MBNF_KERNELS_KERNELS_H_
#define MBNF_KERNELS_KERNELS_H_

#include <cstddef>
#include <span>

#include "mbnf/base/matrix.h"

namespace mbnf::kernels {

enum class Isa { kScalar, kAvx2 };

// One implementation of every data-parallel primitive. The scalar table is the
// reference; vector tables must agree with it up to reassociation of sums.
struct KernelTable {
  Isa isa;
  const char *name;
  // sum_i x[i] * y[i]
  double (*dot)(const double *x, const double *y, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double *x, double *y, std::size_t n);
  // sum_i (x[i] - mean[i])^2 * inv_var[i]
  double (*weighted_sq_dist)(const double *x, const double *mean,
                             const double *inv_var, std::size_t n);
  // y[i] = max(x[i], 0)
  void (*relu)(const double *x, double *y, std::size_t n);
};

const KernelTable &ScalarTable();
// Null when the AVX2 variant was not compiled in or the CPU lacks AVX2+FMA.
const KernelTable *Avx2Table();

// The table selected for this process. Chosen on first use: the MBNF_SIMD
// environment variable ("scalar" or "avx2") wins, otherwise the widest ISA
// the CPU supports.
const KernelTable &Active();
// Overrides the selection; returns false if the ISA is unavailable.
bool SetActiveIsa(Isa isa);

inline double Dot(std::span<const double> x, std::span<const double> y) {
  return Active().dot(x.data(), y.data(), x.size());
}
inline void Axpy(double alpha, std::span<const double> x, std::span<double> y) {
  Active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double WeightedSqDist(std::span<const double> x,
                             std::span<const double> mean,
                             std::span<const double> inv_var) {
  return Active().weighted_sq_dist(x.data(), mean.data(), inv_var.data(),
                                   x.size());
}

// C = A * B^T (+ C when accumulate). A is m x k, B is n x k.
void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);
// C += A^T * B. A is m x k, B is m x n, C is k x n.
void GemmTNAdd(const Matrix &a, const Matrix &b, Matrix *c);
// C = A * B (+ C when accumulate). A is m x k, B is k x n.
void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate = false);

}  // namespace mbnf::kernels

#endif  // MBNF_KERNELS_KERNELS_H_
