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

#include "retrogan/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <numeric>
#include <atomic>
#include <exception>
#include <sstream>
#include <thread>
#include <unordered_set>

namespace retrogan {

namespace {

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_score(std::string_view field) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::pair<std::string, std::string> unordered_key(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    fail(ErrorCode::kUndefinedCorrelation, "spearman_rho: a list has zero rank variance");
  }
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

DatasetFormat dataset_format(const std::string& name) {
  if (name == "simlex") return {0, 1, 3, 1, false};
  if (name == "simverb") return {0, 1, 3, 0, false};
  if (name == "card660") return {0, 1, 2, 0, true};
  if (name == "tsv") return {0, 1, 2, 0, false};

  std::vector<std::size_t> parts;
  std::string_view rest = name;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view field = rest.substr(0, comma);
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
      parts.clear();
      break;
    }
    parts.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (parts.size() != 4) {
    fail(ErrorCode::kConfig, "unknown dataset format '" + name +
                                 "' (use simlex, simverb, card660, tsv or w1,w2,score,header)");
  }
  return {parts[0], parts[1], parts[2], parts[3], false};
}

SimilarityDataset parse_similarity_dataset(std::string_view text, const DatasetFormat& format,
                                           const std::string& name, const std::string& source) {
  SimilarityDataset out;
  out.name = name;
  std::set<std::pair<std::string, std::string>> seen;
  const std::size_t needed =
      std::max({format.word1_column, format.word2_column, format.score_column}) + 1;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line_no <= format.header_lines) continue;
    if (trim(line).empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    const auto fields = split_tabs(line);
    if (fields.size() < needed) {
      fail(ErrorCode::kParse, where + ": expected at least " + std::to_string(needed) +
                                  " tab-separated columns, found " + std::to_string(fields.size()));
    }
    SimilarityPair pair;
    pair.word1 = std::string(trim(fields[format.word1_column]));
    pair.word2 = std::string(trim(fields[format.word2_column]));
    if (pair.word1.empty() || pair.word2.empty()) fail(ErrorCode::kParse, where + ": empty word");
    pair.gold = parse_score(fields[format.score_column]);
    if (!pair.gold && !format.allow_null_scores) {
      fail(ErrorCode::kParse, where + ": bad score '" + std::string(fields[format.score_column]) + "'");
    }
    if (!seen.insert(unordered_key(pair.word1, pair.word2)).second) {
      fail(ErrorCode::kData, where + ": duplicate pair (" + pair.word1 + ", " + pair.word2 + ")");
    }
    out.pairs.push_back(std::move(pair));
  }
  if (out.pairs.empty()) fail(ErrorCode::kEmpty, source + ": no similarity pairs");
  return out;
}

SimilarityDataset load_similarity_dataset(const std::filesystem::path& path,
                                          const DatasetFormat& format, std::string name) {
  if (name.empty()) name = path.stem().string();
  return parse_similarity_dataset(read_text(path), format, name, path.string());
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // Positions i..j (0-based) share rank mean(i+1 .. j+1).
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) {
    fail(ErrorCode::kShape, "spearman_rho: lengths " + std::to_string(xs.size()) + " and " +
                                std::to_string(ys.size()) + " differ");
  }
  if (xs.size() < 2) {
    fail(ErrorCode::kUndefinedCorrelation, "spearman_rho: needs at least 2 items, got " +
                                               std::to_string(xs.size()));
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) {
      fail(ErrorCode::kDomain, "spearman_rho: non-finite value at index " + std::to_string(i));
    }
  }
  const auto rx = average_ranks(xs);
  const auto ry = average_ranks(ys);
  return pearson(rx, ry);
}

MissingPolicy parse_missing_policy(const std::string& name) {
  if (name == "skip") return MissingPolicy::kSkip;
  if (name == "zero") return MissingPolicy::kZero;
  fail(ErrorCode::kConfig, "unknown missing policy '" + name + "' (use skip or zero)");
}

EvalMode parse_eval_mode(const std::string& name) {
  if (name == "all") return EvalMode::kAll;
  if (name == "disjoint") return EvalMode::kDisjoint;
  if (name == "full") return EvalMode::kFull;
  fail(ErrorCode::kConfig, "unknown evaluation mode '" + name + "' (use all, disjoint or full)");
}

const char* eval_mode_name(EvalMode mode) {
  switch (mode) {
    case EvalMode::kDisjoint:
      return "disjoint";
    case EvalMode::kFull:
      return "full";
    case EvalMode::kAll:
      break;
  }
  return "all";
}

std::string eval_report_json(const EvalReport& report) {
  const nlohmann::json j = {{"dataset", report.dataset},
                            {"mode", eval_mode_name(report.mode)},
                            {"rho", report.rho},
                            {"evaluated", report.evaluated},
                            {"skipped", report.skipped}};
  return j.dump();
}

EvalReport evaluate_similarity(const EmbeddingTable& table, const SimilarityDataset& dataset,
                               MissingPolicy policy, EvalMode mode) {
  if (table.size() == 0) fail(ErrorCode::kEmpty, "evaluate_similarity: empty embedding table");
  EvalReport report;
  report.dataset = dataset.name;
  report.mode = mode;
  std::vector<double> model, gold;
  for (const auto& pair : dataset.pairs) {
    if (!pair.gold) {
      ++report.skipped;
      continue;
    }
    const auto a = table.find(pair.word1);
    const auto b = table.find(pair.word2);
    double score = 0.0;
    if (a && b) {
      score = cosine_similarity(table.vector(*a), table.vector(*b));
    } else if (policy == MissingPolicy::kSkip) {
      ++report.skipped;
      continue;
    }
    model.push_back(score);
    gold.push_back(*pair.gold);
  }
  report.evaluated = model.size();
  if (model.size() < 2) {
    fail(ErrorCode::kUndefinedCorrelation,
         "evaluate_similarity: " + std::to_string(model.size()) + " scorable pairs in '" +
             dataset.name + "', need at least 2");
  }
  report.rho = spearman_rho(model, gold);
  return report;
}

ConstraintVocab load_constraint_vocab(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  ConstraintVocab out;
  std::istringstream in(text);
  std::string word;
  while (in >> word) out.insert(word);
  return out;
}

DisjointFullSplit split_disjoint_full(const SimilarityDataset& dataset,
                                      const ConstraintVocab& constraints) {
  DisjointFullSplit out;
  out.disjoint.name = dataset.name;
  out.full.name = dataset.name;
  for (const auto& pair : dataset.pairs) {
    const bool a = constraints.count(pair.word1) != 0;
    const bool b = constraints.count(pair.word2) != 0;
    if (a && b) {
      out.full.pairs.push_back(pair);
    } else if (!a && !b) {
      out.disjoint.pairs.push_back(pair);
    } else {
      ++out.excluded;
    }
  }
  return out;
}

SimilarityDataset select_split(const SimilarityDataset& dataset, const ConstraintVocab& constraints,
                               EvalMode mode) {
  if (mode == EvalMode::kAll) return dataset;
  auto split = split_disjoint_full(dataset, constraints);
  return mode == EvalMode::kDisjoint ? std::move(split.disjoint) : std::move(split.full);
}

std::vector<std::string> benchmark_words(std::span<const SimilarityDataset> datasets) {
  std::set<std::string> words;
  for (const auto& d : datasets) {
    for (const auto& p : d.pairs) {
      words.insert(p.word1);
      words.insert(p.word2);
    }
  }
  return {words.begin(), words.end()};
}

std::vector<std::string> ook_sample(std::span<const std::string> benchmark_vocab, double fraction,
                                    std::uint64_t seed) {
  if (!(fraction > 0.0) || fraction > 1.0) {
    fail(ErrorCode::kInvalidArgument, "OOK fraction must lie in (0, 1], got " + std::to_string(fraction));
  }
  std::vector<std::string> order(benchmark_vocab.begin(), benchmark_vocab.end());
  Rng rng(seed, 0x4f4f4bULL);  // "OOK"
  rng.shuffle(std::span<std::string>(order));
  const auto take = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(order.size()) - 1e-9));
  order.resize(std::min(take, order.size()));
  return order;
}

std::vector<OokCell> ook_harness(const EmbeddingTable& x_table, const EmbeddingTable& y_table,
                                 std::span<const SimilarityDataset> datasets,
                                 const ConstraintVocab& constraints, const OokOptions& options,
                                 const OokTrainFn& train_fn) {
  if (options.fractions.empty()) fail(ErrorCode::kInvalidArgument, "ook_harness: no fractions");
  if (datasets.empty()) fail(ErrorCode::kInvalidArgument, "ook_harness: no datasets");
  if (!train_fn) fail(ErrorCode::kInvalidArgument, "ook_harness: no training function");
  const Alignment aligned = align_pairs(x_table, y_table);
  const auto bench = benchmark_words(datasets);
  const std::unordered_set<std::string> bench_set(bench.begin(), bench.end());

  std::vector<OokCell> cells(options.fractions.size());
  run_parallel(cells.size(), options.jobs, [&](std::size_t f) {
    const double fraction = options.fractions[f];
    const auto sample = ook_sample(bench, fraction, options.seed);
    const std::unordered_set<std::string> released(sample.begin(), sample.end());
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < aligned.corpus.size(); ++i) {
      const std::string& w = aligned.corpus.words[i];
      if (!constraints.empty() && constraints.count(w) == 0) continue;
      if (bench_set.count(w) != 0 && released.count(w) == 0) continue;
      rows.push_back(i);
    }
    if (rows.empty()) {
      fail(ErrorCode::kData, "ook_harness: fraction " + std::to_string(fraction) +
                                 " leaves no training pairs");
    }
    OokCell& cell = cells[f];
    cell.fraction = fraction;
    cell.sampled_words = sample.size();
    cell.training_pairs = rows.size();
    const RetroGanModel model = train_fn(aligned.corpus.subset(rows), fraction);
    const EmbeddingTable specialized = post_specialize(x_table, model);
    for (const auto& d : datasets) {
      cell.reports.push_back(evaluate_similarity(specialized, select_split(d, constraints, options.eval_mode),
                                                 options.missing_policy, options.eval_mode));
    }
  });
  return cells;
}

AblationMode parse_ablation_mode(const std::string& name) {
  if (name == "toggle") return AblationMode::kToggle;
  if (name == "one_by_one") return AblationMode::kOneByOne;
  fail(ErrorCode::kConfig, "unknown ablation mode '" + name + "' (use toggle or one_by_one)");
}

std::vector<Toggles> ablation_variants(const Toggles& base, AblationMode mode,
                                       std::vector<std::string>* names) {
  std::vector<Toggles> out{base};
  if (names != nullptr) *names = {"baseline"};
  Toggles cumulative = base;
  std::string removed;
  for (const char* toggle : kAblationOrder) {
    Toggles t = mode == AblationMode::kToggle ? base : cumulative;
    toggle_by_name(t, toggle) = false;
    if (mode == AblationMode::kOneByOne) {
      cumulative = t;
      removed += (removed.empty() ? "" : "+") + std::string(toggle);
    } else {
      removed = toggle;
    }
    out.push_back(t);
    if (names != nullptr) names->push_back("no_" + removed);
  }
  return out;
}

std::vector<AblationRun> ablation_harness(const PairedCorpus& corpus, const TrainConfig& base_config,
                                          AblationMode mode, const EvalFn& evaluate,
                                          const std::string& selection_metric, std::size_t jobs) {
  base_config.validate();
  std::vector<std::string> names;
  const auto variants = ablation_variants(base_config.toggles, mode, &names);
  std::vector<AblationRun> runs(variants.size());
  run_parallel(variants.size(), jobs, [&](std::size_t i) {
    TrainConfig config = base_config;
    config.toggles = variants[i];
    TrainOptions options;
    options.evaluate = evaluate;
    options.selection_metric = selection_metric;
    TrainResult result = train(corpus, config, options);
    runs[i] = {names[i], variants[i], std::move(result.log), std::move(result.final_state.model),
               result.best_metric};
  });
  return runs;
}

void run_parallel(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  std::vector<std::exception_ptr> errors(count);
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : workers) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean_row_cosine(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kShape, "mean_row_cosine: " + a.shape_string() + " vs " + b.shape_string());
  }
  if (a.rows() == 0) fail(ErrorCode::kEmpty, "mean_row_cosine: no rows");
  double sum = 0.0;
  for (std::size_t r = 0; r < a.rows(); ++r) sum += cosine_similarity(a.row(r), b.row(r));
  return sum / static_cast<double>(a.rows());
}

double mean_recovery_cosine(const RetroGanModel& model, const Matrix& x, const Matrix& y) {
  const ForwardTrace t = forward(model.g, x, ForwardMode::eval(), nullptr);
  return mean_row_cosine(t.output, y);
}

}  // namespace retrogan
