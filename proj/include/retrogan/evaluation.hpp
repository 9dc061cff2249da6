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

// Word-similarity benchmarks scored by Spearman rank correlation between the
// cosine SIMILARITY of two word vectors and the human rating. Similarity, not
// distance, so that a good model gets a positive rho.

#ifndef RETROGAN_EVALUATION_HPP
#define RETROGAN_EVALUATION_HPP

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "retrogan/embeddings.hpp"
#include "retrogan/trainer.hpp"

namespace retrogan {

struct SimilarityPair {
  std::string word1;
  std::string word2;
  std::optional<double> gold;  // nullopt: the benchmark marks the pair unscorable

  bool operator==(const SimilarityPair&) const = default;
};

struct SimilarityDataset {
  std::string name;
  std::vector<SimilarityPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
};

struct DatasetFormat {
  std::size_t word1_column = 0;
  std::size_t word2_column = 1;
  std::size_t score_column = 2;
  std::size_t header_lines = 0;
  // Non-numeric scores become unscorable rows instead of parse errors.
  bool allow_null_scores = false;

  bool operator==(const DatasetFormat&) const = default;
};

// Presets:
//   simlex   SimLex-999.txt     1 header line, columns 0, 1, 3 (SimLex999)
//   simverb  SimVerb-3500.txt   no header, columns 0, 1, 3
//   card660  dataset.tsv        no header, columns 0, 1, 2, null scores allowed
//   tsv      plain w1 w2 score  no header, columns 0, 1, 2
// or a custom "w1,w2,score,header" spec such as "0,1,3,1".
DatasetFormat dataset_format(const std::string& name);

// Tab-separated. A missing column is kParse naming the line; a repeated
// unordered pair is kData; no rows at all is kEmpty.
SimilarityDataset parse_similarity_dataset(std::string_view text, const DatasetFormat& format,
                                           const std::string& name,
                                           const std::string& source = "<memory>");
// `name` defaults to the file stem.
SimilarityDataset load_similarity_dataset(const std::filesystem::path& path,
                                          const DatasetFormat& format, std::string name = "");

// 1-based ranks, ties get the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Fails with kUndefinedCorrelation for fewer than 2 items or a constant list,
// kShape for unequal lengths.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

enum class MissingPolicy {
  kSkip,  // drop pairs with an out-of-vocabulary word
  kZero,  // score them 0
};
MissingPolicy parse_missing_policy(const std::string& name);

enum class EvalMode { kAll, kDisjoint, kFull };
EvalMode parse_eval_mode(const std::string& name);
const char* eval_mode_name(EvalMode mode);

struct EvalReport {
  std::string dataset;
  EvalMode mode = EvalMode::kAll;
  double rho = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;  // missing words, or unscorable gold

  bool operator==(const EvalReport&) const = default;
};

// One JSON object: {"dataset", "mode", "rho", "evaluated", "skipped"}.
std::string eval_report_json(const EvalReport& report);

// `mode` only labels the report; split first to evaluate a subset.
EvalReport evaluate_similarity(const EmbeddingTable& table, const SimilarityDataset& dataset,
                               MissingPolicy policy = MissingPolicy::kSkip,
                               EvalMode mode = EvalMode::kAll);

using ConstraintVocab = std::set<std::string>;

// Every whitespace-separated token of every line is a constrained word, so
// both "w1 w2" pair files and one-word-per-line lists work.
ConstraintVocab load_constraint_vocab(const std::filesystem::path& path);

struct DisjointFullSplit {
  SimilarityDataset disjoint;  // neither word constrained
  SimilarityDataset full;      // both words constrained
  std::size_t excluded = 0;    // exactly one word constrained
};

DisjointFullSplit split_disjoint_full(const SimilarityDataset& dataset,
                                      const ConstraintVocab& constraints);

// The subset selected by `mode` (kAll returns the dataset unchanged).
SimilarityDataset select_split(const SimilarityDataset& dataset, const ConstraintVocab& constraints,
                               EvalMode mode);

// Every distinct word of the datasets, sorted.
std::vector<std::string> benchmark_words(std::span<const SimilarityDataset> datasets);

inline const std::vector<double> kDefaultOokFractions = {0.05, 0.10, 0.25, 0.50, 0.75, 1.00};

struct OokOptions {
  std::vector<double> fractions = kDefaultOokFractions;
  std::uint64_t seed = 0;
  MissingPolicy missing_policy = MissingPolicy::kSkip;
  EvalMode eval_mode = EvalMode::kAll;
  std::size_t jobs = 1;  // fractions trained concurrently
};

// Trains a fresh model on the given corpus.
using OokTrainFn = std::function<RetroGanModel(const PairedCorpus& corpus, double fraction)>;

struct OokCell {
  double fraction = 0.0;
  std::size_t sampled_words = 0;   // benchmark words released into training
  std::size_t training_pairs = 0;  // rows of the training corpus
  std::vector<EvalReport> reports;  // one per dataset, input order
};

// For each fraction f, the first ceil(f * n) words of one seeded permutation
// of the n benchmark words are released, so samples are nested. The training
// vocabulary is every aligned constraint word that is either not a benchmark
// word or released. An empty `constraints` means every aligned word. The
// trained G then post-specializes the whole x table for evaluation.
std::vector<OokCell> ook_harness(const EmbeddingTable& x_table, const EmbeddingTable& y_table,
                                 std::span<const SimilarityDataset> datasets,
                                 const ConstraintVocab& constraints, const OokOptions& options,
                                 const OokTrainFn& train_fn);

// Word sample used by ook_harness for one fraction.
std::vector<std::string> ook_sample(std::span<const std::string> benchmark_vocab, double fraction,
                                    std::uint64_t seed);

enum class AblationMode {
  kToggle,    // baseline, then each toggle off on its own
  kOneByOne,  // baseline, then toggles switched off cumulatively
};
AblationMode parse_ablation_mode(const std::string& name);

// Removal order for kOneByOne.
inline constexpr const char* kAblationOrder[] = {"one_way_mm", "cycle_mm", "cycle_dis", "id_loss",
                                                 "cycle_loss"};

struct AblationRun {
  std::string name;  // "baseline", "no_one_way_mm", "no_one_way_mm+cycle_mm", ...
  Toggles toggles;
  TrainLog log;
  RetroGanModel final_model;
  std::optional<double> best_metric;
};

std::vector<Toggles> ablation_variants(const Toggles& base, AblationMode mode,
                                       std::vector<std::string>* names = nullptr);

std::vector<AblationRun> ablation_harness(const PairedCorpus& corpus, const TrainConfig& base_config,
                                          AblationMode mode, const EvalFn& evaluate = {},
                                          const std::string& selection_metric = "",
                                          std::size_t jobs = 1);

// Calls fn(i) for i in [0, count) on up to `jobs` threads. The first
// exception, by index, is rethrown after all workers finish.
void run_parallel(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Mean over rows of cos(G(x_i), y_i), G in eval mode.
double mean_recovery_cosine(const RetroGanModel& model, const Matrix& x, const Matrix& y);
// Mean over rows of cos(a_i, b_i).
double mean_row_cosine(const Matrix& a, const Matrix& b);

}  // namespace retrogan

#endif  // RETROGAN_EVALUATION_HPP
