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

#include "retrogan/synthetic.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

namespace retrogan {

namespace {

constexpr std::uint64_t kSyntheticStream = 0x53594eULL;  // "SYN"
constexpr double kAntonymPush = 0.5;

void normalize(std::span<double> v) {
  const double n = l2_norm(v);
  if (!(n > 0.0)) fail(ErrorCode::kDegenerateVector, "synthetic vector collapsed to zero");
  for (double& x : v) x /= n;
}

void random_unit(Rng& rng, std::span<double> out) {
  do {
    for (double& x : out) x = rng.gaussian();
  } while (!(l2_norm(out) > 1e-12));
  normalize(out);
}

std::string word_name(std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  return "w" + std::string(width - digits.size(), '0') + digits;
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace

void SyntheticOptions::validate() const {
  if (dim == 0) fail(ErrorCode::kConfig, "synthetic: dim must be >= 1");
  if (n_clusters == 0) fail(ErrorCode::kConfig, "synthetic: n_clusters must be >= 1");
  if (vocab_size < 2 * n_clusters) {
    fail(ErrorCode::kConfig, "synthetic: vocab_size " + std::to_string(vocab_size) +
                                 " must be at least 2 * n_clusters = " + std::to_string(2 * n_clusters));
  }
  if (!(collapse_strength >= 0.0 && collapse_strength <= 1.0)) {
    fail(ErrorCode::kConfig, "synthetic: collapse_strength must lie in [0, 1]");
  }
  if (!(antonym_fraction >= 0.0 && antonym_fraction <= 1.0)) {
    fail(ErrorCode::kConfig, "synthetic: antonym_fraction must lie in [0, 1]");
  }
  if (!(spread >= 0.0) || !std::isfinite(spread)) fail(ErrorCode::kConfig, "synthetic: spread must be >= 0");
  if (!(constraint_coverage >= 0.0 && constraint_coverage <= 1.0)) {
    fail(ErrorCode::kConfig, "synthetic: constraint_coverage must lie in [0, 1]");
  }
  if (n_pairs < 2) fail(ErrorCode::kConfig, "synthetic: n_pairs must be >= 2");
  if (n_pairs > vocab_size * (vocab_size - 1) / 4) {
    fail(ErrorCode::kConfig, "synthetic: n_pairs " + std::to_string(n_pairs) +
                                 " is too large for vocab_size " + std::to_string(vocab_size));
  }
}

SyntheticCorpus synthesize_paired_corpus(const SyntheticOptions& options) {
  options.validate();
  const std::size_t n = options.vocab_size;
  const std::size_t d = options.dim;
  const std::size_t k = options.n_clusters;
  const Rng base(options.seed, kSyntheticStream);
  SyntheticCorpus out;

  Rng centre_rng = base.derive(1);
  out.centres = Matrix(k, d);
  for (std::size_t c = 0; c < k; ++c) random_unit(centre_rng, out.centres.row(c));

  // Balanced assignment: cluster sizes differ by at most one.
  out.cluster_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.cluster_of[i] = i % k;
  Rng assign_rng = base.derive(2);
  assign_rng.shuffle(std::span<std::size_t>(out.cluster_of));

  Rng noise_rng = base.derive(3);
  Matrix x(n, d);
  std::vector<double> u(d);
  for (std::size_t i = 0; i < n; ++i) {
    random_unit(noise_rng, u);
    auto row = x.row(i);
    const auto c = out.centres.row(out.cluster_of[i]);
    for (std::size_t j = 0; j < d; ++j) row[j] = c[j] + options.spread * u[j];
    normalize(row);
  }

  Matrix means(k, d);
  for (std::size_t i = 0; i < n; ++i) {
    auto m = means.row(out.cluster_of[i]);
    const auto r = x.row(i);
    for (std::size_t j = 0; j < d; ++j) m[j] += r[j];
  }
  for (std::size_t c = 0; c < k; ++c) normalize(means.row(c));

  const double s = options.collapse_strength;
  Matrix y = x;
  if (s > 0.0) {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = y.row(i);
      const auto m = means.row(out.cluster_of[i]);
      for (std::size_t j = 0; j < d; ++j) row[j] = (1.0 - s) * row[j] + s * m[j];
      normalize(row);
    }
  }

  // Antonyms: consecutive words of a shuffled order, skipping same-cluster
  // partners.
  const auto n_antonyms = static_cast<std::size_t>(options.antonym_fraction * static_cast<double>(n) / 2.0);
  if (n_antonyms > 0) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng antonym_rng = base.derive(4);
    antonym_rng.shuffle(std::span<std::size_t>(order));
    std::vector<bool> used(n, false);
    for (std::size_t p = 0; p < n && out.antonyms.size() < n_antonyms; ++p) {
      const std::size_t a = order[p];
      if (used[a]) continue;
      for (std::size_t q = p + 1; q < n; ++q) {
        const std::size_t b = order[q];
        if (used[b] || out.cluster_of[b] == out.cluster_of[a]) continue;
        used[a] = used[b] = true;
        out.antonyms.emplace_back(std::min(a, b), std::max(a, b));
        break;
      }
    }
    const Matrix before = y;
    for (const auto& [a, b] : out.antonyms) {
      auto ya = y.row(a);
      auto yb = y.row(b);
      for (std::size_t j = 0; j < d; ++j) {
        ya[j] = before(a, j) - kAntonymPush * before(b, j);
        yb[j] = before(b, j) - kAntonymPush * before(a, j);
      }
      normalize(ya);
      normalize(yb);
    }
  }

  const std::size_t width = std::to_string(n - 1).size();
  std::vector<std::string> words(n);
  for (std::size_t i = 0; i < n; ++i) words[i] = word_name(i, width);

  // Benchmark pairs: antonyms (up to a tenth), half within clusters, rest across.
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return false;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (!seen.insert(key).second) return false;
    pairs.push_back(key);
    return true;
  };
  for (const auto& [a, b] : out.antonyms) {
    if (pairs.size() >= options.n_pairs / 10) break;
    add(a, b);
  }
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < n; ++i) members[out.cluster_of[i]].push_back(i);
  Rng pair_rng = base.derive(5);
  const std::size_t within_target = pairs.size() + options.n_pairs / 2;
  const std::size_t max_attempts = 100 * options.n_pairs;
  std::size_t attempts = 0;
  while (pairs.size() < within_target && attempts++ < max_attempts) {
    const std::size_t a = pair_rng.uniform_index(n);
    const auto& group = members[out.cluster_of[a]];
    add(a, group[pair_rng.uniform_index(group.size())]);
  }
  while (pairs.size() < options.n_pairs && attempts++ < 2 * max_attempts) {
    const std::size_t a = pair_rng.uniform_index(n);
    const std::size_t b = pair_rng.uniform_index(n);
    if (out.cluster_of[a] == out.cluster_of[b]) continue;
    add(a, b);
  }
  if (pairs.size() < options.n_pairs) {
    fail(ErrorCode::kConfig, "synthetic: could not draw " + std::to_string(options.n_pairs) +
                                 " distinct benchmark pairs");
  }

  std::set<std::pair<std::size_t, std::size_t>> antonym_set(out.antonyms.begin(), out.antonyms.end());
  out.dataset.name = "synthetic";
  for (const auto& [a, b] : pairs) {
    double t = 0.0;
    if (antonym_set.count({a, b}) != 0) {
      t = -1.0;
    } else if (out.cluster_of[a] == out.cluster_of[b]) {
      t = 1.0;
    } else {
      t = dot(out.centres.row(out.cluster_of[a]), out.centres.row(out.cluster_of[b]));
    }
    out.dataset.pairs.push_back({words[a], words[b], 5.0 * (t + 1.0)});
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng constraint_rng = base.derive(6);
  constraint_rng.shuffle(std::span<std::size_t>(order));
  const auto covered = static_cast<std::size_t>(
      std::llround(options.constraint_coverage * static_cast<double>(n)));
  for (std::size_t i = 0; i < covered; ++i) out.constraints.insert(words[order[i]]);

  out.x = EmbeddingTable(words, std::move(x), true);
  out.y = EmbeddingTable(std::move(words), std::move(y), true);
  return out;
}

SyntheticFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create '" + dir.string() + "': " + ec.message());
  SyntheticFiles files{dir / "x.vec", dir / "y.vec", dir / "constraints.txt", dir / "benchmark.tsv"};
  save_table(corpus.x, files.x);
  save_table(corpus.y, files.y);

  std::ofstream constraints(files.constraints, std::ios::trunc);
  for (const auto& w : corpus.constraints) constraints << w << '\n';
  constraints.flush();
  if (!constraints) fail(ErrorCode::kIo, "failed writing '" + files.constraints.string() + "'");

  std::ofstream bench(files.benchmark, std::ios::trunc);
  for (const auto& p : corpus.dataset.pairs) {
    bench << p.word1 << '\t' << p.word2 << '\t' << format_double(*p.gold) << '\n';
  }
  bench.flush();
  if (!bench) fail(ErrorCode::kIo, "failed writing '" + files.benchmark.string() + "'");
  return files;
}

}  // namespace retrogan
