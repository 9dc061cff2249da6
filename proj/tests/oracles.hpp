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

// Straightforward reference implementations, written without the library's
// kernels, shared by the unit tests and the acceptance runner.

#ifndef RETROGAN_TESTS_ORACLES_HPP
#define RETROGAN_TESTS_ORACLES_HPP

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "retrogan/embeddings.hpp"
#include "retrogan/losses.hpp"
#include "retrogan/models.hpp"

namespace retrogan::oracle {

inline double cos_rows(const Matrix& a, std::size_t i, const Matrix& b, std::size_t j) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    ab += a(i, c) * b(j, c);
    aa += a(i, c) * a(i, c);
    bb += b(j, c) * b(j, c);
  }
  return ab / std::sqrt(aa * bb);
}

// One hinge term as a double loop over rows and confounders.
inline double margin_term(const Matrix& pred, const Matrix& gold, const Confounders& conf,
                          double delta) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.rows(); ++i) {
    for (std::size_t j = 0; j < conf.k; ++j) {
      const double h = delta - cos_rows(pred, i, gold, i) + cos_rows(pred, i, gold, conf.at(i, j));
      sum += std::max(0.0, h);
    }
  }
  return sum / static_cast<double>(pred.rows() * conf.k);
}

// Rank by counting: 1 + (# smaller) + (# equal - 1) / 2.
inline std::vector<double> counting_ranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = 1.0 + less + (equal - 1.0) / 2.0;
  }
  return r;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(counting_ranks(a), counting_ranks(b));
}

// Scalar Adam recurrence with the default betas and epsilon. grads[t][i] is
// the gradient of parameter i at step t + 1; returns the parameters after
// every step.
inline std::vector<std::vector<double>> adam_trajectory(std::vector<double> params,
                                                       const std::vector<std::vector<double>>& grads,
                                                       double lr) {
  std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
  std::vector<std::vector<double>> out;
  for (std::size_t t = 1; t <= grads.size(); ++t) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double g = grads[t - 1][i];
      m[i] = 0.9 * m[i] + 0.1 * g;
      v[i] = 0.999 * v[i] + 0.001 * g * g;
      const double mh = m[i] / (1.0 - std::pow(0.9, static_cast<double>(t)));
      const double vh = v[i] / (1.0 - std::pow(0.999, static_cast<double>(t)));
      params[i] -= lr * mh / (std::sqrt(vh) + 1e-8);
    }
    out.push_back(params);
  }
  return out;
}

// (cosine, row) for every table row, best first, ties in table order; the
// query itself scores exactly 1.
inline std::vector<std::pair<double, std::size_t>> exhaustive_neighbors(const EmbeddingTable& t,
                                                                        std::size_t q) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t i = 0; i < t.size(); ++i) {
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t c = 0; c < t.dim(); ++c) {
      ab += t.vector(q)[c] * t.vector(i)[c];
      aa += t.vector(q)[c] * t.vector(q)[c];
      bb += t.vector(i)[c] * t.vector(i)[c];
    }
    all.push_back({i == q ? 1.0 : ab / std::sqrt(aa * bb), i});
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  return all;
}

// Generator whose eval-mode output equals its input: relu(x) - relu(-x).
inline Network identity_generator(std::size_t d) {
  ArchitectureConfig arch;
  arch.dim = d;
  arch.generator_size = 2 * d;
  arch.generator_hidden_layers = 2;
  Network net(generator_layers(arch));
  auto& p = net.params();
  p[0].weight = Matrix(d, 2 * d);
  for (std::size_t i = 0; i < d; ++i) {
    p[0].weight(i, i) = 1.0;
    p[0].weight(i, d + i) = -1.0;
  }
  p[0].bias = Matrix(1, 2 * d);
  p[3].weight = Matrix::identity(2 * d);
  p[3].bias = Matrix(1, 2 * d);
  p[6].weight = Matrix(2 * d, d);
  for (std::size_t i = 0; i < d; ++i) {
    p[6].weight(i, i) = 1.0;
    p[6].weight(d + i, i) = -1.0;
  }
  p[6].bias = Matrix(1, d);
  return net;
}

inline void zero_network(Network& net) {
  for (Matrix* t : net.trainable()) t->fill(0.0);
}

}  // namespace retrogan::oracle

#endif  // RETROGAN_TESTS_ORACLES_HPP
