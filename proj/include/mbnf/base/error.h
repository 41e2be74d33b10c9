// include/mbnf/base/error.h

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

#ifndef MBNF_BASE_ERROR_H_
#define MBNF_BASE_ERROR_H_

#include <stdexcept>
#include <string>

namespace mbnf {

// Process exit codes used by the command-line tools.
enum class ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kConfig = 2,
  kMissingData = 3,
  kWouldOverwrite = 4,
  kIntegrity = 5,
  kUsage = 64,
};

// Base class of every error raised by the library. Each error carries the
// exit code a CLI front-end should terminate with.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const { return code_; }

 private:
  ExitCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string &what)
      : Error(ExitCode::kConfig, what) {}
};

// Malformed input text (manifest lines, config files, hypothesis files).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string &what)
      : Error(ExitCode::kConfig, what) {}
};

// Well-formed input that violates a data-model invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string &what)
      : Error(ExitCode::kConfig, what) {}
};

// Required data is absent or empty (no frames, missing audio, ...).
class DataError : public Error {
 public:
  explicit DataError(const std::string &what)
      : Error(ExitCode::kMissingData, what) {}
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string &what)
      : Error(ExitCode::kInternal, what) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string &what)
      : Error(ExitCode::kIntegrity, what) {}
};

class WouldOverwriteError : public Error {
 public:
  explicit WouldOverwriteError(const std::string &what)
      : Error(ExitCode::kWouldOverwrite, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string &what)
      : Error(ExitCode::kUsage, what) {}
};

// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string &what)
      : Error(ExitCode::kInternal, what) {}
};

}  // namespace mbnf

#endif  // MBNF_BASE_ERROR_H_
