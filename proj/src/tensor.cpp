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

#include "retrogan/tensor.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace retrogan {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

ConstMap view(const Matrix& m) {
  return ConstMap(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                  static_cast<Eigen::Index>(m.cols()));
}

MutMap view(Matrix& m) {
  return MutMap(m.values().data(), static_cast<Eigen::Index>(m.rows()),
                static_cast<Eigen::Index>(m.cols()));
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kShape, std::string(what) + ": shape mismatch " + a.shape_string() +
                                " vs " + b.shape_string());
  }
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

}  // namespace

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kShape: return "shape error";
    case ErrorCode::kDegenerateVector: return "degenerate vector";
    case ErrorCode::kParse: return "parse error";
    case ErrorCode::kDimension: return "dimension error";
    case ErrorCode::kEmpty: return "empty input";
    case ErrorCode::kIo: return "I/O error";
    case ErrorCode::kConfig: return "config error";
    case ErrorCode::kConfigMismatch: return "config mismatch";
    case ErrorCode::kCheckpoint: return "checkpoint error";
    case ErrorCode::kData: return "data error";
    case ErrorCode::kAlignment: return "alignment error";
    case ErrorCode::kVocabulary: return "vocabulary error";
    case ErrorCode::kUndefinedCorrelation: return "undefined correlation";
    case ErrorCode::kInsufficientConfounders: return "insufficient confounders";
    case ErrorCode::kDomain: return "domain error";
    case ErrorCode::kInvalidState: return "invalid state";
    case ErrorCode::kInternal: return "internal error";
  }
  return "unknown error";
}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    fail(ErrorCode::kShape, "matrix data length " + std::to_string(data_.size()) +
                                " does not match " + shape_string());
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) fail(ErrorCode::kShape, "ragged rows in matrix literal");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    fail(ErrorCode::kShape, "matmul: inner dimensions disagree " + a.shape_string() + " * " +
                                b.shape_string());
  }
  Matrix out(a.rows(), b.cols());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b);
  return out;
}

Matrix matmul_at(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCode::kShape, "matmul_at: row counts disagree " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  Matrix out(a.cols(), b.cols());
  if (out.empty() || a.rows() == 0) return out;
  view(out).noalias() = view(a).transpose() * view(b);
  return out;
}

Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    fail(ErrorCode::kShape, "matmul_bt: column counts disagree " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  Matrix out(a.rows(), b.rows());
  if (out.empty() || a.cols() == 0) return out;
  view(out).noalias() = view(a) * view(b).transpose();
  return out;
}

void add_in_place(Matrix& target, const Matrix& other) {
  require_same_shape(target, other, "add");
  auto t = target.values();
  auto o = other.values();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += o[i];
}

void axpy_in_place(Matrix& target, double scale, const Matrix& other) {
  require_same_shape(target, other, "axpy");
  auto t = target.values();
  auto o = other.values();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] += scale * o[i];
}

Matrix column_sums(const Matrix& m) {
  Matrix out(1, m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) out(0, c) += row[c];
  }
  return out;
}

Matrix hconcat(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    fail(ErrorCode::kShape, "hconcat: row counts disagree " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto dst = out.row(r);
    std::copy(a.row(r).begin(), a.row(r).end(), dst.begin());
    std::copy(b.row(r).begin(), b.row(r).end(), dst.begin() + static_cast<std::ptrdiff_t>(a.cols()));
  }
  return out;
}

Matrix column_block(const Matrix& m, std::size_t first, std::size_t count) {
  if (first + count > m.cols()) {
    fail(ErrorCode::kShape, "column_block out of range for " + m.shape_string());
  }
  Matrix out(m.rows(), count);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto src = m.row(r).subspan(first, count);
    std::copy(src.begin(), src.end(), out.row(r).begin());
  }
  return out;
}

Matrix select_rows(const Matrix& m, std::span<const std::size_t> indices) {
  Matrix out(indices.size(), m.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= m.rows()) {
      fail(ErrorCode::kShape, "select_rows: index " + std::to_string(indices[i]) +
                                  " out of range for " + m.shape_string());
    }
    const auto src = m.row(indices[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

double dot(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) fail(ErrorCode::kShape, "dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

Matrix row_l2_normalize(const Matrix& m) {
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double norm = l2_norm(row);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      fail(ErrorCode::kDegenerateVector,
           "row " + std::to_string(r) + " has zero or non-finite norm");
    }
    for (double& v : row) v /= norm;
  }
  return out;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) fail(ErrorCode::kShape, "cosine_similarity: length mismatch");
  const double nu = l2_norm(u);
  const double nv = l2_norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    fail(ErrorCode::kDegenerateVector, "cosine_similarity: zero vector");
  }
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64_mix(splitmix64_mix(seed) ^ (stream * kGoldenGamma + 0x632BE59BD9B4E019ULL))),
      counter_(0) {}

Rng Rng::restore(std::uint64_t key, std::uint64_t counter) {
  Rng r;
  r.key_ = key;
  r.counter_ = counter;
  return r;
}

Rng Rng::derive(std::uint64_t tag) const {
  Rng r;
  r.key_ = splitmix64_mix(key_ ^ splitmix64_mix(tag + 0xD1B54A32D192ED03ULL));
  return r;
}

std::uint64_t Rng::next_u64() {
  ++counter_;
  return splitmix64_mix(key_ + counter_ * kGoldenGamma);
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform_open_zero() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  if (n == 0) fail(ErrorCode::kInvalidArgument, "uniform_index: empty range");
  // Rejection sampling on the top of the range keeps every residue equally likely.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t draw = next_u64();
  while (draw >= limit) draw = next_u64();
  return draw % n;
}

double Rng::gaussian() {
  const double u1 = uniform_open_zero();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool Rng::bernoulli(double p) { return uniform() < p; }

Matrix draw_gaussian(Rng& rng, std::size_t rows, std::size_t cols, double mean, double stddev) {
  if (stddev < 0.0) fail(ErrorCode::kInvalidArgument, "draw_gaussian: negative stddev");
  Matrix out(rows, cols);
  for (double& v : out.values()) v = mean + stddev * rng.gaussian();
  return out;
}

}  // namespace retrogan
