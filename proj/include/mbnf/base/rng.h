// include/mbnf/base/rng.h

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

#ifndef MBNF_BASE_RNG_H_
#define MBNF_BASE_RNG_H_

#include <cstdint>
#include <random>
#include <string_view>

namespace mbnf {

// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t MixSeed(std::uint64_t x);

// Seed of the substream identified by (master, a, b). Derivation does not
// depend on the order in which substreams are requested.
std::uint64_t SubSeed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

// FNV-1a of a string, for turning names into substream ids.
std::uint64_t HashName(std::string_view name);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double Gauss() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  // Uniform integer in [lo, hi].
  int UniformInt(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace mbnf

#endif  // MBNF_BASE_RNG_H_
