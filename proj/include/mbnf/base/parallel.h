// include/mbnf/base/parallel.h

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

#ifndef MBNF_BASE_PARALLEL_H_
#define MBNF_BASE_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace mbnf {

// Runs body(i) for i in [0, n) on up to num_jobs threads. Each index is
// processed exactly once; callers write results to per-index slots so that the
// outcome does not depend on num_jobs. The first exception thrown by any
// worker is rethrown on the calling thread.
void ParallelFor(std::size_t n, int num_jobs,
                 const std::function<void(std::size_t)> &body);

}  // namespace mbnf

#endif  // MBNF_BASE_PARALLEL_H_
