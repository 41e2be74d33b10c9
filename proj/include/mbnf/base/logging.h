// include/mbnf/base/logging.h

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

#ifndef MBNF_BASE_LOGGING_H_
#define MBNF_BASE_LOGGING_H_

#include <spdlog/spdlog.h>

namespace mbnf {

// Library-wide logger; writes to stderr.
spdlog::logger &Log();

// 0 = warnings only, 1 = info, 2 = debug.
void SetVerbosity(int level);

}  // namespace mbnf

#endif  // MBNF_BASE_LOGGING_H_
