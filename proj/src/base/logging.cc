// src/base/logging.cc

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

#include "mbnf/base/logging.h"

#include <spdlog/sinks/stdout_color_sinks.h>

namespace mbnf {

spdlog::logger &Log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("mbnf");
    l->set_pattern("%^%l%$ (%n) %v");
    l->set_level(spdlog::level::warn);
    return l;
  }();
  return *logger;
}

void SetVerbosity(int level) {
  if (level <= 0)
    Log().set_level(spdlog::level::warn);
  else if (level == 1)
    Log().set_level(spdlog::level::info);
  else
    Log().set_level(spdlog::level::debug);
}

}  // namespace mbnf
