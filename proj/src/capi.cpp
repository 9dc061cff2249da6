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

#include "retrogan/retrogan.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <new>
#include <string>

#include "retrogan/checkpoint.hpp"
#include "retrogan/workflows.hpp"

struct rg_config {
  retrogan::RunConfig value;
};
struct rg_table {
  retrogan::EmbeddingTable value;
};
struct rg_model {
  retrogan::Checkpoint value;
};
struct rg_dataset {
  retrogan::SimilarityDataset value;
};

namespace {

using retrogan::ErrorCode;
using nlohmann::json;

thread_local std::string g_last_error;

rg_status set_error(rg_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
rg_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RG_OK;
  } catch (const retrogan::Error& e) {
    return set_error(static_cast<rg_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(RG_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(RG_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(RG_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) retrogan::fail(ErrorCode::kInvalidArgument, std::string(what) + " is NULL");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void maybe_return(char** out, const std::string& s) {
  if (out != nullptr) *out = copy_string(s);
}

retrogan::SyntheticOptions to_options(const rg_synthetic_options& o) {
  retrogan::SyntheticOptions s;
  s.seed = o.seed;
  s.vocab_size = o.vocab_size;
  s.dim = o.dim;
  s.n_clusters = o.n_clusters;
  s.collapse_strength = o.collapse_strength;
  s.antonym_fraction = o.antonym_fraction;
  s.spread = o.spread;
  s.n_pairs = o.n_pairs;
  s.constraint_coverage = o.constraint_coverage;
  return s;
}

json report_json(const retrogan::EvalReport& r) { return json::parse(retrogan::eval_report_json(r)); }

}  // namespace

extern "C" {

const char* rg_version(void) { return "0.1.0"; }

const char* rg_last_error(void) { return g_last_error.c_str(); }

const char* rg_status_name(rg_status status) {
  if (status == RG_OK) return "ok";
  return retrogan::error_code_name(static_cast<ErrorCode>(status));
}

void rg_string_free(char* s) { std::free(s); }

rg_status rg_config_create(const char* preset, rg_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<rg_config>();
    if (preset != nullptr) {
      c->value.train = retrogan::TrainConfig::preset(preset);
      c->value.preset = preset;
    }
    *out = c.release();
  });
}

rg_status rg_config_load_file(const char* path, rg_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto c = std::make_unique<rg_config>();
    c->value = retrogan::load_run_config(path);
    *out = c.release();
  });
}

rg_status rg_config_set(rg_config* config, const char* key, const char* value) {
  return guarded([&] {
    require(config, "config");
    require(key, "key");
    require(value, "value");
    retrogan::RunConfig updated = config->value;
    retrogan::set_config_value(updated, key, value);
    config->value = std::move(updated);
  });
}

rg_status rg_config_to_json(const rg_config* config, char** out_json) {
  return guarded([&] {
    require(config, "config");
    require(out_json, "out_json");
    *out_json = copy_string(retrogan::to_json(config->value).dump(2));
  });
}

const char* rg_config_reference(void) {
  static const std::string text = retrogan::config_reference();
  return text.c_str();
}

void rg_config_free(rg_config* config) { delete config; }

rg_status rg_table_load(const char* path, size_t expected_dim, rg_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<rg_table>();
    t->value = retrogan::load_table(path, expected_dim).table;
    *out = t.release();
  });
}

rg_status rg_table_save(const rg_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    retrogan::save_table(table->value, path);
  });
}

rg_status rg_table_preprocess(const rg_table* table, rg_table** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<rg_table>();
    t->value = retrogan::preprocess(table->value);
    *out = t.release();
  });
}

size_t rg_table_size(const rg_table* table) { return table == nullptr ? 0 : table->value.size(); }

size_t rg_table_dim(const rg_table* table) { return table == nullptr ? 0 : table->value.dim(); }

rg_status rg_table_word(const rg_table* table, size_t index, const char** out_word) {
  return guarded([&] {
    require(table, "table");
    require(out_word, "out_word");
    if (index >= table->value.size()) retrogan::fail(ErrorCode::kInvalidArgument, "index out of range");
    *out_word = table->value.words()[index].c_str();
  });
}

rg_status rg_table_vector(const rg_table* table, size_t index, const double** out_values) {
  return guarded([&] {
    require(table, "table");
    require(out_values, "out_values");
    if (index >= table->value.size()) retrogan::fail(ErrorCode::kInvalidArgument, "index out of range");
    *out_values = table->value.vector(index).data();
  });
}

rg_status rg_table_neighbors(const rg_table* table, const char* word, size_t k, const char** words,
                             double* cosines) {
  return guarded([&] {
    require(table, "table");
    require(word, "word");
    if (k > 0) {
      require(words, "words");
      require(cosines, "cosines");
    }
    const auto result = retrogan::nearest_neighbors(table->value, word, k);
    for (std::size_t i = 0; i < result.size(); ++i) {
      words[i] = table->value.words()[table->value.index_of(result[i].word)].c_str();
      cosines[i] = result[i].cosine;
    }
  });
}

void rg_table_free(rg_table* table) { delete table; }

rg_status rg_model_load(const char* checkpoint_path, rg_model** out) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(out, "out");
    *out = nullptr;
    auto m = std::make_unique<rg_model>();
    m->value = retrogan::load_checkpoint(checkpoint_path);
    *out = m.release();
  });
}

rg_status rg_model_save(const rg_model* model, const char* checkpoint_path) {
  return guarded([&] {
    require(model, "model");
    require(checkpoint_path, "checkpoint_path");
    retrogan::save_checkpoint(model->value.state, model->value.config, checkpoint_path);
  });
}

size_t rg_model_dim(const rg_model* model) { return model == nullptr ? 0 : model->value.state.model.dim(); }

uint64_t rg_model_step(const rg_model* model) { return model == nullptr ? 0 : model->value.state.step; }

size_t rg_model_parameter_count(const rg_model* model) {
  return model == nullptr ? 0 : model->value.state.model.parameter_count();
}

rg_status rg_model_postspecialize(const rg_model* model, const rg_table* input, rg_table** out) {
  return guarded([&] {
    require(model, "model");
    require(input, "input");
    require(out, "out");
    *out = nullptr;
    auto t = std::make_unique<rg_table>();
    t->value = retrogan::post_specialize(input->value, model->value.state.model);
    *out = t.release();
  });
}

void rg_model_free(rg_model* model) { delete model; }

rg_status rg_dataset_load(const char* path, const char* format, const char* name, rg_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(format, "format");
    require(out, "out");
    *out = nullptr;
    auto d = std::make_unique<rg_dataset>();
    d->value = retrogan::load_similarity_dataset(path, retrogan::dataset_format(format),
                                                 name == nullptr ? "" : name);
    *out = d.release();
  });
}

size_t rg_dataset_size(const rg_dataset* dataset) { return dataset == nullptr ? 0 : dataset->value.size(); }

void rg_dataset_free(rg_dataset* dataset) { delete dataset; }

rg_status rg_evaluate(const rg_table* table, const rg_dataset* dataset, const char* constraints_path,
                      const char* mode, const char* missing_policy, rg_report* out, char** out_json) {
  return guarded([&] {
    require(table, "table");
    require(dataset, "dataset");
    const auto eval_mode = retrogan::parse_eval_mode(mode == nullptr ? "all" : mode);
    const auto policy = retrogan::parse_missing_policy(missing_policy == nullptr ? "skip" : missing_policy);
    retrogan::ConstraintVocab constraints;
    if (constraints_path != nullptr) constraints = retrogan::load_constraint_vocab(constraints_path);
    const auto report = retrogan::evaluate_similarity(
        table->value, retrogan::select_split(dataset->value, constraints, eval_mode), policy, eval_mode);
    if (out != nullptr) *out = {report.rho, report.evaluated, report.skipped};
    maybe_return(out_json, retrogan::eval_report_json(report));
  });
}

rg_status rg_train_run(const rg_config* config, const char* out_dir, int verbose, char** out_summary_json) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    const auto s = retrogan::run_train(config->value, out_dir, verbose ? &std::cerr : nullptr);
    json j = {{"steps", s.steps}, {"training_pairs", s.training_pairs}, {"best_step", s.best_step}};
    j["best_metric"] = s.best_metric ? json(*s.best_metric) : json(nullptr);
    j["reports"] = json::array();
    for (const auto& r : s.reports) j["reports"].push_back(report_json(r));
    maybe_return(out_summary_json, j.dump());
  });
}

rg_status rg_postspecialize_file(const char* checkpoint_path, const char* input_path, const char* output_path) {
  return guarded([&] {
    require(checkpoint_path, "checkpoint_path");
    require(input_path, "input_path");
    require(output_path, "output_path");
    retrogan::run_postspecialize(checkpoint_path, input_path, output_path);
  });
}

rg_status rg_ook_run(const rg_config* config, const double* fractions, size_t n_fractions, const char* out_dir,
                     size_t jobs, int verbose, char** out_summary_json) {
  return guarded([&] {
    require(config, "config");
    require(out_dir, "out_dir");
    std::vector<double> f = retrogan::kDefaultOokFractions;
    if (n_fractions > 0) {
      require(fractions, "fractions");
      f.assign(fractions, fractions + n_fractions);
    }
    const auto cells = retrogan::run_ook(config->value, f, out_dir, jobs, verbose ? &std::cerr : nullptr);
    json rows = json::array();
    for (const auto& cell : cells) {
      for (const auto& r : cell.reports) {
        json row = report_json(r);
        row["fraction"] = cell.fraction;
        row["training_pairs"] = cell.training_pairs;
        rows.push_back(row);
      }
    }
    maybe_return(out_summary_json, rows.dump());
  });
}

rg_status rg_ablate_run(const rg_config* config, const char* mode, const char* out_dir, size_t jobs,
                        int verbose, char** out_summary_json) {
  return guarded([&] {
    require(config, "config");
    require(mode, "mode");
    require(out_dir, "out_dir");
    const auto runs = retrogan::run_ablate(config->value, retrogan::parse_ablation_mode(mode), out_dir, jobs,
                                           verbose ? &std::cerr : nullptr);
    json rows = json::array();
    for (const auto& run : runs) {
      json row = {{"run", run.name}};
      row["best_metric"] = run.best_metric ? json(*run.best_metric) : json(nullptr);
      rows.push_back(row);
    }
    maybe_return(out_summary_json, rows.dump());
  });
}

void rg_synthetic_options_default(rg_synthetic_options* options) {
  if (options == nullptr) return;
  const retrogan::SyntheticOptions d;
  *options = {d.seed,          d.vocab_size, d.dim,     d.n_clusters,         d.collapse_strength,
              d.antonym_fraction, d.spread,  d.n_pairs, d.constraint_coverage};
}

rg_status rg_synthetic_generate(const rg_synthetic_options* options, const char* out_dir) {
  return guarded([&] {
    require(options, "options");
    require(out_dir, "out_dir");
    retrogan::run_gen_synthetic(to_options(*options), out_dir);
  });
}

rg_status rg_synthetic_attach(rg_config* config, const rg_synthetic_options* options, const char* dir) {
  return guarded([&] {
    require(config, "config");
    require(options, "options");
    require(dir, "dir");
    config->value = retrogan::with_synthetic_data(config->value, to_options(*options), dir);
  });
}

}  // extern "C"
