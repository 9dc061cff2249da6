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

// Small stand-in for a distributional / retrofitted embedding pair.
//
//   centre c_k     random unit vector per cluster
//   x_i            normalize(c_k + spread * u_i), u_i a random unit vector
//   y_i            normalize((1 - s) x_i + s m_k), m_k the normalized mean
//                  of cluster k's x vectors (synonyms attract)
//   antonyms       pairs (i, j) from different clusters, then
//                  y_i <- normalize(y_i - 0.5 y_j) and vice versa
//   gold(i, j)     5 (t + 1) with t = 1 in one cluster, -1 for antonyms,
//                  cos(c_a, c_b) otherwise
//
// With s = 0 and no antonyms, y equals x exactly.

#ifndef RETROGAN_SYNTHETIC_HPP
#define RETROGAN_SYNTHETIC_HPP

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "retrogan/evaluation.hpp"

namespace retrogan {

struct SyntheticOptions {
  std::uint64_t seed = 0;
  std::size_t vocab_size = 2000;
  std::size_t dim = 32;
  std::size_t n_clusters = 50;
  double collapse_strength = 0.9;
  double antonym_fraction = 0.05;  // share of words placed in an antonym pair
  double spread = 1.5;
  std::size_t n_pairs = 3000;         // benchmark size; half within clusters
  double constraint_coverage = 1.0;   // share of words in the constraint vocabulary

  void validate() const;
  bool operator==(const SyntheticOptions&) const = default;
};

struct SyntheticCorpus {
  EmbeddingTable x;
  EmbeddingTable y;
  ConstraintVocab constraints;
  SimilarityDataset dataset;

  // Ground truth.
  std::vector<std::size_t> cluster_of;  // per word
  Matrix centres;                       // n_clusters x dim
  std::vector<std::pair<std::size_t, std::size_t>> antonyms;
};

// Word i is named "w" followed by i zero-padded, so table order is sorted.
SyntheticCorpus synthesize_paired_corpus(const SyntheticOptions& options);

struct SyntheticFiles {
  std::filesystem::path x;            // x.vec
  std::filesystem::path y;            // y.vec
  std::filesystem::path constraints;  // constraints.txt, one word per line
  std::filesystem::path benchmark;    // benchmark.tsv, "tsv" format
};

SyntheticFiles write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

}  // namespace retrogan

#endif  // RETROGAN_SYNTHETIC_HPP
