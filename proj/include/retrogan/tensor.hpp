// Copyright 2026 The RetroGAN Authors. All Rights Reserved.
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

// Dense row-major matrices and the deterministic random stream used by every
// other part of the library.

#ifndef RETROGAN_TENSOR_HPP
#define RETROGAN_TENSOR_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "retrogan/error.hpp"

namespace retrogan {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double value);
  bool all_finite() const noexcept;
  std::string shape_string() const;

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a[m x k] * b[k x n].
Matrix matmul(const Matrix& a, const Matrix& b);
// transpose(a) * b.
Matrix matmul_at(const Matrix& a, const Matrix& b);
// a * transpose(b).
Matrix matmul_bt(const Matrix& a, const Matrix& b);

void add_in_place(Matrix& target, const Matrix& other);
void axpy_in_place(Matrix& target, double scale, const Matrix& other);
// Column sums as a 1 x cols matrix.
Matrix column_sums(const Matrix& m);

// [a | b], row-aligned.
Matrix hconcat(const Matrix& a, const Matrix& b);
// Columns [first, first + count).
Matrix column_block(const Matrix& m, std::size_t first, std::size_t count);
Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices);

double dot(std::span<const double> u, std::span<const double> v);
double l2_norm(std::span<const double> v);

// Every row scaled to unit Euclidean norm. An all-zero row is a
// kDegenerateVector error naming the row.
Matrix row_l2_normalize(const Matrix& m);

double cosine_similarity(std::span<const double> u, std::span<const double> v);

// SplitMix64 run in counter mode: draw n is mix(key + n * golden_gamma), so a
// stream is fully described by (key, counter) and sub-streams are derived by
// re-keying. The sequence depends only on integer arithmetic and is identical
// on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream = 0);

  static Rng restore(std::uint64_t key, std::uint64_t counter);

  // Independent stream keyed by this stream's key and `tag`. Does not
  // advance this stream.
  Rng derive(std::uint64_t tag) const;

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  // Uniform in (0, 1].
  double uniform_open_zero();
  // Unbiased uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  // Box-Muller; consumes two draws per call.
  double gaussian();
  bool bernoulli(double p);

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  bool operator==(const Rng& other) const = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept;

Matrix draw_gaussian(Rng& rng, std::size_t rows, std::size_t cols, double mean, double stddev);

}  // namespace retrogan

#endif  // RETROGAN_TENSOR_HPP
