// Copyright 2026 liasr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIASR_LINALG_HPP_
#define LIASR_LINALG_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace liasr {

using Vector = std::vector<double>;

// Dense row-major matrix of doubles.  All arithmetic in the project is
// double precision; gradient checks at 1e-6 tolerance do not survive floats.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major, rows * cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols + j];
  }

  // Row i as a copy.
  Vector row(std::size_t i) const {
    return Vector(data.begin() + static_cast<std::ptrdiff_t>(i * cols),
                  data.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
  }

  bool operator==(const Matrix& other) const = default;
};

// Row-vector-times-matrix product: v is 1 x rows, the result is 1 x cols.
inline Vector matvec(const Matrix& m, const Vector& v) {
  if (v.size() != m.rows) {
    throw std::invalid_argument("matvec: vector length " +
                                std::to_string(v.size()) +
                                " does not match matrix rows " +
                                std::to_string(m.rows));
  }
  Vector out(m.cols, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double vi = v[i];
    for (std::size_t j = 0; j < m.cols; ++j) {
      out[j] += vi * m(i, j);
    }
  }
  return out;
}

// Copy of a square matrix with the diagonal set to zero.
inline Matrix zero_diag(const Matrix& m) {
  if (m.rows != m.cols) {
    throw std::invalid_argument("zero_diag: matrix must be square, got " +
                                std::to_string(m.rows) + "x" +
                                std::to_string(m.cols));
  }
  Matrix out = m;
  for (std::size_t i = 0; i < m.rows; ++i) out(i, i) = 0.0;
  return out;
}

// Elementwise product x (.) g, i.e. x times the diagonal matrix built from g.
inline Vector diag_gate(const Vector& x, const Vector& g) {
  if (x.size() != g.size()) {
    throw std::invalid_argument("diag_gate: length mismatch " +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(g.size()));
  }
  Vector out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] * g[i];
  return out;
}

// Outer product a b^T: result(i, j) = a[i] * b[j].
inline Matrix outer(const Vector& a, const Vector& b) {
  Matrix out(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      out(i, j) = a[i] * b[j];
    }
  }
  return out;
}

inline Matrix transpose(const Matrix& m) {
  Matrix out(m.cols, m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      out(j, i) = m(i, j);
    }
  }
  return out;
}

}  // namespace liasr

#endif  // LIASR_LINALG_HPP_
