// src/kernels/dispatch.cc

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

#include <atomic>
#include <cstdlib>
#include <string>

#include "mbnf/base/error.h"
#include "mbnf/kernels/kernels.h"

namespace mbnf::kernels {

#if defined(MBNF_HAVE_AVX2)
const KernelTable &Avx2TableImpl();
#endif

namespace {

bool CpuHasAvx2() {
#if defined(MBNF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable *SelectInitial() {
  const char *env = std::getenv("MBNF_SIMD");
  std::string want = env != nullptr ? env : "";
  if (want == "scalar") return &ScalarTable();
  const KernelTable *avx2 = Avx2Table();
  if (avx2 != nullptr) return avx2;
  return &ScalarTable();
}

std::atomic<const KernelTable *> &ActiveSlot() {
  static std::atomic<const KernelTable *> slot{SelectInitial()};
  return slot;
}

}  // namespace

const KernelTable *Avx2Table() {
#if defined(MBNF_HAVE_AVX2)
  static const bool available = CpuHasAvx2();
  return available ? &Avx2TableImpl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable &Active() {
  return *ActiveSlot().load(std::memory_order_relaxed);
}

bool SetActiveIsa(Isa isa) {
  const KernelTable *table =
      isa == Isa::kScalar ? &ScalarTable() : Avx2Table();
  if (table == nullptr) return false;
  ActiveSlot().store(table, std::memory_order_relaxed);
  return true;
}

void GemmNT(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.NumCols() != b.NumCols())
    throw DimensionError("GemmNT: inner dimensions differ");
  if (!accumulate) c->Resize(a.NumRows(), b.NumRows());
  if (c->NumRows() != a.NumRows() || c->NumCols() != b.NumRows())
    throw DimensionError("GemmNT: output has wrong shape");
  const KernelTable &k = Active();
  const std::size_t inner = a.NumCols();
  for (std::size_t i = 0; i < a.NumRows(); ++i) {
    const double *ai = a.Row(i).data();
    double *ci = c->Row(i).data();
    for (std::size_t j = 0; j < b.NumRows(); ++j)
      ci[j] += k.dot(ai, b.Row(j).data(), inner);
  }
}

void GemmTNAdd(const Matrix &a, const Matrix &b, Matrix *c) {
  if (a.NumRows() != b.NumRows() || c->NumRows() != a.NumCols() ||
      c->NumCols() != b.NumCols())
    throw DimensionError("GemmTNAdd: shape mismatch");
  const KernelTable &k = Active();
  for (std::size_t r = 0; r < a.NumRows(); ++r) {
    const double *br = b.Row(r).data();
    for (std::size_t i = 0; i < a.NumCols(); ++i) {
      double alpha = a(r, i);
      if (alpha != 0.0) k.axpy(alpha, br, c->Row(i).data(), b.NumCols());
    }
  }
}

void GemmNN(const Matrix &a, const Matrix &b, Matrix *c, bool accumulate) {
  if (a.NumCols() != b.NumRows())
    throw DimensionError("GemmNN: inner dimensions differ");
  if (!accumulate) c->Resize(a.NumRows(), b.NumCols());
  if (c->NumRows() != a.NumRows() || c->NumCols() != b.NumCols())
    throw DimensionError("GemmNN: output has wrong shape");
  const KernelTable &k = Active();
  for (std::size_t i = 0; i < a.NumRows(); ++i) {
    double *ci = c->Row(i).data();
    for (std::size_t p = 0; p < a.NumCols(); ++p) {
      double alpha = a(i, p);
      if (alpha != 0.0) k.axpy(alpha, b.Row(p).data(), ci, b.NumCols());
    }
  }
}

}  // namespace mbnf::kernels
