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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "retrogan/error.hpp"
#include "retrogan/tensor.hpp"
#include "support.hpp"

using namespace retrogan;

namespace {

Matrix triple_loop(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  return c;
}

Matrix transpose(const Matrix& m) {
  Matrix t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.values()[i] - b.values()[i]));
  return worst;
}

}  // namespace

TEST_CASE("matmul matches a triple loop") {
  Rng rng(7);
  for (auto [m, k, n] : {std::tuple{1, 1, 1}, {3, 5, 2}, {17, 9, 13}, {64, 33, 8}}) {
    const Matrix a = testing::random_matrix(rng, m, k);
    const Matrix b = testing::random_matrix(rng, k, n);
    const Matrix ref = triple_loop(a, b);
    const Matrix got = matmul(a, b);
    REQUIRE(got.rows() == ref.rows());
    REQUIRE(got.cols() == ref.cols());
    CHECK(max_abs_diff(got, ref) < 1e-12);
    CHECK(max_abs_diff(matmul_at(transpose(a), b), ref) < 1e-12);
    CHECK(max_abs_diff(matmul_bt(a, transpose(b)), ref) < 1e-12);
  }
}

TEST_CASE("matmul rejects mismatched shapes") {
  try {
    matmul(Matrix(2, 3), Matrix(2, 3));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShape);
  }
}

TEST_CASE("row normalization and cosine") {
  const Matrix m = Matrix::from_rows({{3, 4}, {0, 2}});
  const Matrix n = row_l2_normalize(m);
  CHECK(n(0, 0) == doctest::Approx(0.6));
  CHECK(n(0, 1) == doctest::Approx(0.8));
  CHECK(n(1, 1) == 1.0);
  CHECK(cosine_similarity(m.row(0), m.row(1)) == doctest::Approx(0.8));
  CHECK_THROWS_AS(row_l2_normalize(Matrix(1, 3)), Error);
}

TEST_CASE("hconcat and column_block invert each other") {
  Rng rng(1);
  const Matrix a = testing::random_matrix(rng, 4, 3);
  const Matrix b = testing::random_matrix(rng, 4, 5);
  const Matrix ab = hconcat(a, b);
  CHECK(ab.cols() == 8);
  CHECK(column_block(ab, 0, 3) == a);
  CHECK(column_block(ab, 3, 5) == b);
}

TEST_CASE("rng is a pure function of key and counter") {
  Rng a(42, 3);
  Rng b(42, 3);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c = Rng::restore(a.key(), a.counter());
  CHECK(c.next_u64() == a.next_u64());
  CHECK(Rng(42, 3).next_u64() != Rng(42, 4).next_u64());
  CHECK(Rng(43, 3).next_u64() != Rng(42, 3).next_u64());
}

TEST_CASE("derive does not advance the parent") {
  Rng parent(5);
  const Rng before = parent;
  const Rng child = parent.derive(9);
  CHECK(parent == before);
  CHECK(child.key() != parent.key());
  CHECK(parent.derive(9) == child);
  CHECK(parent.derive(10) != child);
}

TEST_CASE("splitmix64 reference values") {
  // First outputs of the reference SplitMix64 generator seeded with 0.
  std::uint64_t state = 0;
  auto next = [&] {
    state += 0x9e3779b97f4a7c15ULL;
    return splitmix64_mix(state);
  };
  CHECK(next() == 0xe220a8397b1dcdafULL);
  CHECK(next() == 0x6e789e6aa1b965f4ULL);
  CHECK(next() == 0x06c45d188009454fULL);
}

TEST_CASE("uniform draws stay in range and look uniform") {
  Rng rng(11);
  double sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_open_zero();
    REQUIRE(v > 0.0);
    REQUIRE(v <= 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[rng.uniform_index(7)];
  for (int h : hist) CHECK(std::abs(h - 1000) < 150);
}

TEST_CASE("gaussian moments") {
  Rng rng(3);
  double s = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s += g;
    s2 += g * g;
  }
  CHECK(std::abs(s / n) < 0.03);
  CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("shuffle is a seeded permutation") {
  std::vector<int> a(50);
  std::iota(a.begin(), a.end(), 0);
  std::vector<int> b = a;
  Rng(9).shuffle(std::span<int>(a));
  Rng(9).shuffle(std::span<int>(b));
  CHECK(a == b);
  std::vector<int> sorted = a;
  std::sort(sorted.begin(), sorted.end());
  std::vector<int> expected(50);
  std::iota(expected.begin(), expected.end(), 0);
  CHECK(sorted == expected);
  CHECK(a != expected);
}
