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

// End-to-end jobs shared by the C API and the command-line tool. Each one
// reads its inputs from disk, writes its artifacts into an output directory
// and returns a short summary.

#ifndef RETROGAN_WORKFLOWS_HPP
#define RETROGAN_WORKFLOWS_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "retrogan/evaluation.hpp"
#include "retrogan/run_config.hpp"
#include "retrogan/synthetic.hpp"

namespace retrogan {

struct TrainingData {
  EmbeddingTable x_table;  // normalized
  EmbeddingTable y_table;  // normalized when data.normalize_targets
  PairedCorpus corpus;     // aligned, restricted to the constraint vocabulary if one is given
  ConstraintVocab constraints;
  std::vector<SimilarityDataset> benchmarks;
  std::size_t dropped_x = 0;
  std::size_t dropped_y = 0;
};

TrainingData load_training_data(const RunConfig& config);
std::vector<SimilarityDataset> load_benchmarks(const std::vector<BenchmarkSpec>& specs);

// Post-specializes `x_table` and scores every benchmark. Metric keys are
// "rho/<dataset>"; a benchmark with too few scorable pairs is left out.
EvalFn make_eval_fn(const EmbeddingTable& x_table, const std::vector<SimilarityDataset>& benchmarks,
                    const ConstraintVocab& constraints, EvalMode mode, MissingPolicy policy);

std::vector<EvalReport> evaluate_benchmarks(const EmbeddingTable& table,
                                            const std::vector<SimilarityDataset>& benchmarks,
                                            const ConstraintVocab& constraints, EvalMode mode,
                                            MissingPolicy policy);

struct TrainSummary {
  std::uint64_t steps = 0;
  std::size_t training_pairs = 0;
  std::uint64_t best_step = 0;
  std::optional<double> best_metric;
  std::vector<EvalReport> reports;  // final model
};

// Writes into out_dir:
//   config.json        effective configuration
//   final.ckpt         state after the last step
//   best.ckpt          weights of the best eval snapshot (optimizer moments reset)
//   train_log.jsonl    one record per step and per eval snapshot
//   eval_report.jsonl  final-model report, when benchmarks are configured
TrainSummary run_train(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream* progress = nullptr);

// Generates a synthetic corpus into `dir` and points the data section at it.
RunConfig with_synthetic_data(RunConfig config, const SyntheticOptions& options,
                              const std::filesystem::path& dir);

// Loads the table, normalizes it, applies G and saves the result.
void run_postspecialize(const std::filesystem::path& checkpoint, const std::filesystem::path& input,
                        const std::filesystem::path& output);

// One grid row per (fraction, dataset), written to out_dir/ook_grid.jsonl.
std::vector<OokCell> run_ook(const RunConfig& config, const std::vector<double>& fractions,
                             const std::filesystem::path& out_dir, std::size_t jobs = 1,
                             std::ostream* progress = nullptr);

// One row per run in out_dir/ablation.jsonl plus out_dir/<run>/train_log.jsonl.
std::vector<AblationRun> run_ablate(const RunConfig& config, AblationMode mode,
                                    const std::filesystem::path& out_dir, std::size_t jobs = 1,
                                    std::ostream* progress = nullptr);

SyntheticFiles run_gen_synthetic(const SyntheticOptions& options, const std::filesystem::path& out_dir);

void write_text_file(const std::filesystem::path& path, const std::string& text);
void ensure_directory(const std::filesystem::path& dir);

}  // namespace retrogan

#endif  // RETROGAN_WORKFLOWS_HPP
