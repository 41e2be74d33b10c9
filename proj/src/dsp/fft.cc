// src/dsp/fft.cc

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

#include "mbnf/dsp/fft.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mbnf/base/error.h"

namespace mbnf {

FftPlan::FftPlan(std::size_t size) : size_(size) {
  if (size < 2 || (size & (size - 1)) != 0)
    throw ConfigError("FFT size must be a power of two >= 2");
  twiddles_.resize(size / 2);
  for (std::size_t k = 0; k < size / 2; ++k) {
    double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / size;
    twiddles_[k] = {std::cos(angle), std::sin(angle)};
  }
  std::size_t bits = 0;
  while ((std::size_t{1} << bits) < size) ++bits;
  bit_reverse_.resize(size);
  for (std::size_t i = 0; i < size; ++i) {
    std::size_t r = 0;
    for (std::size_t b = 0; b < bits; ++b)
      if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
    bit_reverse_[i] = r;
  }
}

void FftPlan::Forward(std::span<std::complex<double>> data) const {
  if (data.size() != size_) throw DimensionError("FftPlan::Forward: wrong size");
  for (std::size_t i = 0; i < size_; ++i)
    if (i < bit_reverse_[i]) std::swap(data[i], data[bit_reverse_[i]]);
  for (std::size_t len = 2; len <= size_; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = size_ / len;
    for (std::size_t start = 0; start < size_; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        std::complex<double> t = twiddles_[k * stride] * data[start + k + half];
        std::complex<double> u = data[start + k];
        data[start + k] = u + t;
        data[start + k + half] = u - t;
      }
    }
  }
}

void FftPlan::PowerSpectrum(std::span<const double> signal,
                            std::vector<double> *power) const {
  if (signal.size() > size_)
    throw DimensionError("FftPlan::PowerSpectrum: signal longer than FFT");
  std::vector<std::complex<double>> buf(size_);
  std::copy(signal.begin(), signal.end(), buf.begin());
  Forward(buf);
  power->resize(size_ / 2 + 1);
  for (std::size_t k = 0; k <= size_ / 2; ++k) (*power)[k] = std::norm(buf[k]);
}

}  // namespace mbnf
