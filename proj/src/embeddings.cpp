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

#include "retrogan/embeddings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace retrogan {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    const std::size_t start = i;
    while (i < line.size() && !is_space(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view field, T& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) fail(ErrorCode::kIo, "failed reading '" + path.string() + "'");
  return buffer.str();
}

}  // namespace

EmbeddingTable::EmbeddingTable(std::vector<std::string> words, Matrix vectors, bool normalized)
    : words_(std::move(words)), vectors_(std::move(vectors)), normalized_(normalized) {
  if (words_.size() != vectors_.rows()) {
    fail(ErrorCode::kData, "embedding table has " + std::to_string(words_.size()) + " words but " +
                               std::to_string(vectors_.rows()) + " vectors");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (!index_.emplace(words_[i], i).second) {
      fail(ErrorCode::kData, "duplicate word '" + words_[i] + "' in embedding table");
    }
  }
  if (!vectors_.all_finite()) fail(ErrorCode::kData, "embedding table has non-finite values");
}

std::optional<std::size_t> EmbeddingTable::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t EmbeddingTable::index_of(std::string_view word) const {
  const auto i = find(word);
  if (!i) fail(ErrorCode::kVocabulary, "word '" + std::string(word) + "' is not in the vocabulary");
  return *i;
}

EmbeddingTable EmbeddingTable::subset(std::span<const std::string> words) const {
  std::vector<std::size_t> rows;
  rows.reserve(words.size());
  for (const auto& w : words) rows.push_back(index_of(w));
  return EmbeddingTable(std::vector<std::string>(words.begin(), words.end()),
                        select_rows(vectors_, rows), normalized_);
}

LoadedTable parse_table(std::string_view text, std::size_t expected_dim, const std::string& source) {
  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_map<std::string, std::size_t> seen;
  std::size_t dim = 0;
  std::optional<std::size_t> header_count;
  std::size_t duplicates = 0;
  std::size_t line_no = 0;
  bool first_content = true;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    const auto fields = split_fields(line);
    if (fields.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);

    if (first_content) {
      first_content = false;
      std::size_t count = 0;
      std::size_t width = 0;
      if (fields.size() == 2 && parse_number(fields[0], count) && parse_number(fields[1], width)) {
        if (width == 0) fail(ErrorCode::kParse, where + ": header declares zero dimension");
        header_count = count;
        dim = width;
        continue;
      }
    }

    if (fields.size() < 2) fail(ErrorCode::kParse, where + ": expected a token followed by values");
    const std::size_t width = fields.size() - 1;
    if (dim == 0) dim = width;
    if (width != dim) {
      fail(ErrorCode::kParse, where + ": expected " + std::to_string(dim) + " values, found " +
                                  std::to_string(width));
    }
    std::string token(fields[0]);
    if (seen.count(token) != 0) {
      ++duplicates;
      continue;
    }
    for (std::size_t k = 1; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_number(fields[k], v) || !std::isfinite(v)) {
        fail(ErrorCode::kParse, where + ": bad value '" + std::string(fields[k]) + "'");
      }
      values.push_back(v);
    }
    seen.emplace(token, words.size());
    words.push_back(std::move(token));
  }

  if (words.empty()) fail(ErrorCode::kEmpty, source + ": no embeddings found");
  if (expected_dim != 0 && dim != expected_dim) {
    fail(ErrorCode::kDimension, source + ": dimension " + std::to_string(dim) + ", expected " +
                                    std::to_string(expected_dim));
  }
  if (header_count && *header_count != words.size() + duplicates) {
    fail(ErrorCode::kParse, source + ": header declares " + std::to_string(*header_count) +
                                " rows, file has " + std::to_string(words.size() + duplicates));
  }
  const std::size_t rows = words.size();
  return {EmbeddingTable(std::move(words), Matrix(rows, dim, std::move(values))), duplicates};
}

LoadedTable load_table(const std::filesystem::path& path, std::size_t expected_dim) {
  return parse_table(read_file(path), expected_dim, path.string());
}

void save_table(const EmbeddingTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << table.size() << ' ' << table.dim() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << table.words()[i];
    for (double v : table.vector(i)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

EmbeddingTable preprocess(const EmbeddingTable& table) {
  Matrix v = table.vectors();
  for (std::size_t r = 0; r < v.rows(); ++r) {
    auto row = v.row(r);
    const double norm = l2_norm(row);
    if (!(norm > 0.0)) {
      fail(ErrorCode::kDegenerateVector, "word '" + table.words()[r] + "' has a zero vector");
    }
    for (double& x : row) x /= norm;
  }
  return EmbeddingTable(table.words(), std::move(v), true);
}

PairedCorpus PairedCorpus::subset(std::span<const std::size_t> rows) const {
  PairedCorpus out;
  out.words.reserve(rows.size());
  for (std::size_t r : rows) {
    if (r >= words.size()) fail(ErrorCode::kShape, "corpus row out of range");
    out.words.push_back(words[r]);
  }
  out.x = select_rows(x, rows);
  out.y = select_rows(y, rows);
  return out;
}

Alignment align_pairs(const EmbeddingTable& x_table, const EmbeddingTable& y_table) {
  if (x_table.dim() != y_table.dim()) {
    fail(ErrorCode::kDimension, "align_pairs: x has dimension " + std::to_string(x_table.dim()) +
                                    ", y has " + std::to_string(y_table.dim()));
  }
  std::vector<std::string> shared;
  for (const auto& w : x_table.words()) {
    if (y_table.contains(w)) shared.push_back(w);
  }
  if (shared.empty()) fail(ErrorCode::kAlignment, "align_pairs: vocabularies do not intersect");
  std::sort(shared.begin(), shared.end());

  Alignment out;
  out.dropped_x = x_table.size() - shared.size();
  out.dropped_y = y_table.size() - shared.size();
  out.corpus.x = x_table.subset(shared).vectors();
  out.corpus.y = y_table.subset(shared).vectors();
  out.corpus.words = std::move(shared);
  return out;
}

EmbeddingTable post_specialize(const EmbeddingTable& table, const RetroGanModel& model,
                               std::size_t batch_size) {
  if (table.dim() != model.dim()) {
    fail(ErrorCode::kDimension, "post_specialize: table dimension " + std::to_string(table.dim()) +
                                    " does not match model dimension " +
                                    std::to_string(model.dim()));
  }
  if (batch_size == 0) fail(ErrorCode::kInvalidArgument, "post_specialize: batch_size must be >= 1");
  Matrix out(table.size(), table.dim());
  std::vector<std::size_t> rows;
  for (std::size_t start = 0; start < table.size(); start += batch_size) {
    const std::size_t stop = std::min(table.size(), start + batch_size);
    rows.resize(stop - start);
    std::iota(rows.begin(), rows.end(), start);
    const ForwardTrace t = forward(model.g, select_rows(table.vectors(), rows), ForwardMode::eval(), nullptr);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::copy(t.output.row(r).begin(), t.output.row(r).end(), out.row(start + r).begin());
    }
  }
  return EmbeddingTable(table.words(), std::move(out), false);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingTable& table, std::string_view word,
                                        std::size_t k) {
  const std::size_t query = table.index_of(word);
  if (k > table.size()) {
    fail(ErrorCode::kInvalidArgument, "nearest_neighbors: k = " + std::to_string(k) +
                                          " exceeds vocabulary size " +
                                          std::to_string(table.size()));
  }
  std::vector<double> scores(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    scores[i] = cosine_similarity(table.vector(query), table.vector(i));
  }
  scores[query] = 1.0;
  std::vector<std::size_t> order(table.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<Neighbor> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({table.words()[order[i]], scores[order[i]]});
  return out;
}

}  // namespace retrogan
