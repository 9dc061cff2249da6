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

#include "retrogan/workflows.hpp"

#include <fstream>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <sstream>

#include "retrogan/checkpoint.hpp"

namespace retrogan {

using nlohmann::json;

namespace {

std::string report_line(const EvalReport& r) { return eval_report_json(r); }

void write_reports(const std::filesystem::path& path, const std::vector<EvalReport>& reports) {
  std::string text;
  for (const auto& r : reports) text += report_line(r) + '\n';
  write_text_file(path, text);
}

// Weights of `model` with fresh optimizer moments.
TrainerState weights_only_state(const RetroGanModel& model, const TrainConfig& config,
                                std::uint64_t step) {
  TrainerState state = initial_state(config);
  state.model = model;
  state.step = step;
  return state;
}

json toggles_json(const Toggles& t) {
  return {{"one_way_mm", t.one_way_mm}, {"cycle_mm", t.cycle_mm}, {"cycle_dis", t.cycle_dis},
          {"id_loss", t.id_loss},       {"cycle_loss", t.cycle_loss}, {"gan_loss", t.gan_loss}};
}

}  // namespace

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create directory '" + dir.string() + "': " + ec.message());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write '" + path.string() + "'");
  out << text;
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

std::vector<SimilarityDataset> load_benchmarks(const std::vector<BenchmarkSpec>& specs) {
  std::vector<SimilarityDataset> out;
  for (const auto& spec : specs) {
    out.push_back(load_similarity_dataset(spec.path, dataset_format(spec.format), spec.name));
  }
  return out;
}

TrainingData load_training_data(const RunConfig& config) {
  const DataConfig& data = config.data;
  if (data.x_embeddings.empty()) fail(ErrorCode::kConfig, "data.x_embeddings is not set");
  if (data.y_embeddings.empty()) fail(ErrorCode::kConfig, "data.y_embeddings is not set");
  const std::size_t dim = config.train.architecture.dim;

  TrainingData out;
  out.x_table = preprocess(load_table(data.x_embeddings, dim).table);
  out.y_table = load_table(data.y_embeddings, dim).table;
  if (data.normalize_targets) out.y_table = preprocess(out.y_table);
  if (!data.constraints.empty()) out.constraints = load_constraint_vocab(data.constraints);
  out.benchmarks = load_benchmarks(data.benchmarks);

  Alignment aligned = align_pairs(out.x_table, out.y_table);
  out.dropped_x = aligned.dropped_x;
  out.dropped_y = aligned.dropped_y;
  if (out.constraints.empty()) {
    out.corpus = std::move(aligned.corpus);
  } else {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < aligned.corpus.size(); ++i) {
      if (out.constraints.count(aligned.corpus.words[i]) != 0) rows.push_back(i);
    }
    if (rows.empty()) fail(ErrorCode::kData, "no aligned word appears in the constraint vocabulary");
    out.corpus = aligned.corpus.subset(rows);
  }
  return out;
}

std::vector<EvalReport> evaluate_benchmarks(const EmbeddingTable& table,
                                            const std::vector<SimilarityDataset>& benchmarks,
                                            const ConstraintVocab& constraints, EvalMode mode,
                                            MissingPolicy policy) {
  std::vector<EvalReport> out;
  for (const auto& d : benchmarks) {
    out.push_back(evaluate_similarity(table, select_split(d, constraints, mode), policy, mode));
  }
  return out;
}

EvalFn make_eval_fn(const EmbeddingTable& x_table, const std::vector<SimilarityDataset>& benchmarks,
                    const ConstraintVocab& constraints, EvalMode mode, MissingPolicy policy) {
  if (benchmarks.empty()) return {};
  std::vector<SimilarityDataset> splits;
  for (const auto& d : benchmarks) splits.push_back(select_split(d, constraints, mode));
  return [&x_table, splits = std::move(splits), mode, policy](const RetroGanModel& model, std::uint64_t) {
    const EmbeddingTable specialized = post_specialize(x_table, model);
    std::map<std::string, double> metrics;
    for (const auto& d : splits) {
      try {
        metrics["rho/" + d.name] = evaluate_similarity(specialized, d, policy, mode).rho;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kUndefinedCorrelation) throw;
      }
    }
    return metrics;
  };
}

TrainSummary run_train(const RunConfig& config, const std::filesystem::path& out_dir,
                       std::ostream* progress) {
  config.train.validate();
  const TrainingData data = load_training_data(config);
  ensure_directory(out_dir);
  write_text_file(out_dir / "config.json", to_json(config).dump(2) + '\n');
  if (progress != nullptr) {
    *progress << "training on " << data.corpus.size() << " pairs (dropped " << data.dropped_x
              << " x-only, " << data.dropped_y << " y-only words)\n";
  }

  const EvalMode mode = parse_eval_mode(config.data.eval_mode);
  const MissingPolicy policy = parse_missing_policy(config.data.missing_policy);
  std::ofstream log(out_dir / "train_log.jsonl", std::ios::trunc);
  if (!log) fail(ErrorCode::kIo, "cannot write '" + (out_dir / "train_log.jsonl").string() + "'");

  TrainOptions options;
  options.evaluate = make_eval_fn(data.x_table, data.benchmarks, data.constraints, mode, policy);
  options.on_step = [&](const StepRecord& r) { log << step_record_json(r) << '\n'; };
  options.on_eval = [&](const EvalSnapshot& s) {
    log << eval_snapshot_json(s) << '\n';
    if (progress != nullptr) *progress << eval_snapshot_json(s) << '\n';
  };
  TrainResult result = train(data.corpus, config.train, options);
  log.flush();
  if (!log) fail(ErrorCode::kIo, "failed writing the training log");

  save_checkpoint(result.final_state, config.train, out_dir / "final.ckpt");
  save_checkpoint(weights_only_state(result.best_model, config.train, result.best_step), config.train,
                  out_dir / "best.ckpt");

  TrainSummary summary;
  summary.steps = result.final_state.step;
  summary.training_pairs = data.corpus.size();
  summary.best_step = result.best_step;
  summary.best_metric = result.best_metric;
  if (!data.benchmarks.empty()) {
    const EmbeddingTable specialized = post_specialize(data.x_table, result.final_state.model);
    summary.reports = evaluate_benchmarks(specialized, data.benchmarks, data.constraints, mode, policy);
    write_reports(out_dir / "eval_report.jsonl", summary.reports);
  }
  return summary;
}

RunConfig with_synthetic_data(RunConfig config, const SyntheticOptions& options,
                              const std::filesystem::path& dir) {
  SyntheticOptions opts = options;
  opts.dim = config.train.architecture.dim;
  const SyntheticFiles files = write_synthetic_corpus(synthesize_paired_corpus(opts), dir);
  config.data.x_embeddings = files.x.string();
  config.data.y_embeddings = files.y.string();
  config.data.constraints = files.constraints.string();
  config.data.benchmarks = {{files.benchmark.string(), "tsv", "synthetic"}};
  return config;
}

void run_postspecialize(const std::filesystem::path& checkpoint, const std::filesystem::path& input,
                        const std::filesystem::path& output) {
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  const EmbeddingTable table = preprocess(load_table(input, ckpt.state.model.dim()).table);
  save_table(post_specialize(table, ckpt.state.model), output);
}

std::vector<OokCell> run_ook(const RunConfig& config, const std::vector<double>& fractions,
                             const std::filesystem::path& out_dir, std::size_t jobs,
                             std::ostream* progress) {
  config.train.validate();
  const TrainingData data = load_training_data(config);
  if (data.benchmarks.empty()) fail(ErrorCode::kConfig, "ook needs at least one benchmark in data.benchmarks");
  ensure_directory(out_dir);
  write_text_file(out_dir / "config.json", to_json(config).dump(2) + '\n');

  OokOptions options;
  options.fractions = fractions;
  options.seed = config.train.seed;
  options.missing_policy = parse_missing_policy(config.data.missing_policy);
  options.eval_mode = parse_eval_mode(config.data.eval_mode);
  options.jobs = jobs;
  std::mutex progress_mutex;
  const auto cells = ook_harness(
      data.x_table, data.y_table, data.benchmarks, data.constraints, options,
      [&](const PairedCorpus& corpus, double fraction) {
        if (progress != nullptr) {
          std::lock_guard lock(progress_mutex);
          *progress << "fraction " << fraction << ": training on " << corpus.size() << " pairs\n";
        }
        return train(corpus, config.train).final_state.model;
      });

  std::string text;
  for (const auto& cell : cells) {
    for (const auto& r : cell.reports) {
      json row = json::parse(report_line(r));
      row["fraction"] = cell.fraction;
      row["sampled_words"] = cell.sampled_words;
      row["training_pairs"] = cell.training_pairs;
      text += row.dump() + '\n';
    }
  }
  write_text_file(out_dir / "ook_grid.jsonl", text);
  return cells;
}

std::vector<AblationRun> run_ablate(const RunConfig& config, AblationMode mode,
                                    const std::filesystem::path& out_dir, std::size_t jobs,
                                    std::ostream* progress) {
  config.train.validate();
  const TrainingData data = load_training_data(config);
  ensure_directory(out_dir);
  write_text_file(out_dir / "config.json", to_json(config).dump(2) + '\n');
  const EvalMode eval_mode = parse_eval_mode(config.data.eval_mode);
  const MissingPolicy policy = parse_missing_policy(config.data.missing_policy);
  const EvalFn evaluate = make_eval_fn(data.x_table, data.benchmarks, data.constraints, eval_mode, policy);
  if (progress != nullptr) *progress << "ablation on " << data.corpus.size() << " pairs\n";
  auto runs = ablation_harness(data.corpus, config.train, mode, evaluate, "", jobs);

  std::string summary;
  for (const auto& run : runs) {
    const auto dir = out_dir / run.name;
    ensure_directory(dir);
    std::ostringstream log;
    run.log.write_jsonl(log);
    write_text_file(dir / "train_log.jsonl", log.str());
    json row = {{"run", run.name},
                {"toggles", toggles_json(run.toggles)},
                {"recovery_cosine", mean_recovery_cosine(run.final_model, data.corpus.x, data.corpus.y)}};
    row["best_metric"] = run.best_metric ? json(*run.best_metric) : json(nullptr);
    summary += row.dump() + '\n';
  }
  write_text_file(out_dir / "ablation.jsonl", summary);
  return runs;
}

SyntheticFiles run_gen_synthetic(const SyntheticOptions& options, const std::filesystem::path& out_dir) {
  const SyntheticFiles files = write_synthetic_corpus(synthesize_paired_corpus(options), out_dir);
  const json j = {{"seed", options.seed},
                  {"vocab_size", options.vocab_size},
                  {"dim", options.dim},
                  {"n_clusters", options.n_clusters},
                  {"collapse_strength", options.collapse_strength},
                  {"antonym_fraction", options.antonym_fraction},
                  {"spread", options.spread},
                  {"n_pairs", options.n_pairs},
                  {"constraint_coverage", options.constraint_coverage}};
  write_text_file(out_dir / "options.json", j.dump(2) + '\n');
  return files;
}

}  // namespace retrogan
