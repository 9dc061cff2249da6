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

// Word-embedding tables in the usual text format:
//
//   [count dim]            optional header
//   token v1 v2 ... vd     one line per word
//
// A token is everything up to the first space or tab. Saving always writes
// the header and 17 significant digits per value.

#ifndef RETROGAN_EMBEDDINGS_HPP
#define RETROGAN_EMBEDDINGS_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "retrogan/models.hpp"

namespace retrogan {

class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  // Fails with kData on duplicate words or a row count mismatch.
  EmbeddingTable(std::vector<std::string> words, Matrix vectors, bool normalized = false);

  std::size_t size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return vectors_.cols(); }
  bool normalized() const noexcept { return normalized_; }
  const std::vector<std::string>& words() const noexcept { return words_; }
  const Matrix& vectors() const noexcept { return vectors_; }

  std::optional<std::size_t> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  // Fails with kVocabulary for unknown words.
  std::size_t index_of(std::string_view word) const;
  std::span<const double> vector(std::size_t i) const { return vectors_.row(i); }

  // Rows for `words`, in the given order.
  EmbeddingTable subset(std::span<const std::string> words) const;

 private:
  std::vector<std::string> words_;
  Matrix vectors_;
  bool normalized_ = false;
  std::unordered_map<std::string, std::size_t> index_;
};

struct LoadedTable {
  EmbeddingTable table;
  std::size_t duplicates_skipped = 0;
};

// expected_dim == 0 accepts whatever width the file has.
LoadedTable load_table(const std::filesystem::path& path, std::size_t expected_dim = 0);
LoadedTable parse_table(std::string_view text, std::size_t expected_dim = 0,
                        const std::string& source = "<memory>");
void save_table(const EmbeddingTable& table, const std::filesystem::path& path);

// Row-L2-normalised copy. A zero vector is a kDegenerateVector error naming
// the word.
EmbeddingTable preprocess(const EmbeddingTable& table);

struct PairedCorpus {
  std::vector<std::string> words;  // sorted
  Matrix x;
  Matrix y;

  std::size_t size() const noexcept { return words.size(); }
  std::size_t dim() const noexcept { return x.cols(); }
  // Rows for the given indices, preserving order.
  PairedCorpus subset(std::span<const std::size_t> rows) const;
};

struct Alignment {
  PairedCorpus corpus;
  std::size_t dropped_x = 0;  // words only in x
  std::size_t dropped_y = 0;  // words only in y
};

Alignment align_pairs(const EmbeddingTable& x_table, const EmbeddingTable& y_table);

// Applies G in eval mode to every row, batch_size rows at a time.
EmbeddingTable post_specialize(const EmbeddingTable& table, const RetroGanModel& model,
                               std::size_t batch_size = 1024);

struct Neighbor {
  std::string word;
  double cosine = 0.0;

  bool operator==(const Neighbor&) const = default;
};

// Top-k by cosine, descending; ties keep vocabulary order. The query itself
// is included.
std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::string_view word,
                                        std::size_t k);

}  // namespace retrogan

#endif  // RETROGAN_EMBEDDINGS_HPP
