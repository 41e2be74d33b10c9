// include/mbnf/base/matrix.h

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

#ifndef MBNF_BASE_MATRIX_H_
#define MBNF_BASE_MATRIX_H_

#include <cstddef>
#include <span>
#include <vector>

namespace mbnf {

// Dense row-major matrix of doubles. Rows are contiguous so that a row can be
// handed to the kernels as a span.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  std::size_t NumRows() const { return rows_; }
  std::size_t NumCols() const { return cols_; }
  std::size_t Size() const { return data_.size(); }
  bool Empty() const { return data_.empty(); }

  double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> Row(std::size_t r) {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> Row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  double *Data() { return data_.data(); }
  const double *Data() const { return data_.data(); }
  std::span<double> Values() { return data_; }
  std::span<const double> Values() const { return data_; }

  void Resize(std::size_t rows, std::size_t cols, double fill = 0.0);
  void SetZero();
  // Appends one row; cols must match unless the matrix is empty.
  void AppendRow(std::span<const double> row);

  // True when every entry is finite.
  bool IsFinite() const;

  bool operator==(const Matrix &other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace mbnf

#endif  // MBNF_BASE_MATRIX_H_
