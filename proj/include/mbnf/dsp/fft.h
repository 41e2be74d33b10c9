// include/mbnf/dsp/fft.h

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

#ifndef MBNF_DSP_FFT_H_
#define MBNF_DSP_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mbnf {

// Iterative radix-2 FFT of a fixed power-of-two size. Immutable after
// construction and therefore safe to share between threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t size);
  std::size_t Size() const { return size_; }

  // In-place forward transform, X[k] = sum_n x[n] exp(-2 pi i k n / N).
  void Forward(std::span<std::complex<double>> data) const;

  // |X[k]|^2 for k = 0..N/2 of a real signal zero-padded to N.
  void PowerSpectrum(std::span<const double> signal,
                     std::vector<double> *power) const;

 private:
  std::size_t size_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

}  // namespace mbnf

#endif  // MBNF_DSP_FFT_H_
