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

// retrogan: command-line front end over the C API.
//
// Exit codes: 0 success, 1 internal error, 2 usage or input error.
// Reports go to standard output or files; diagnostics to standard error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "retrogan/retrogan.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInput = 2;

// Raised after the message has been printed.
struct CommandFailed {
  int exit_code;
};

int exit_code_for(rg_status s) {
  switch (s) {
    case RG_OK:
      return kExitOk;
    case RG_ERR_SHAPE:
    case RG_ERR_INVALID_STATE:
    case RG_ERR_INTERNAL:
      return kExitInternal;
    default:
      return kExitInput;
  }
}

void check(rg_status s) {
  if (s == RG_OK) return;
  std::cerr << "retrogan: " << rg_status_name(s) << ": " << rg_last_error() << '\n';
  throw CommandFailed{exit_code_for(s)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "retrogan: " << message << '\n';
  throw CommandFailed{kExitInput};
}

struct ConfigDeleter {
  void operator()(rg_config* c) const { rg_config_free(c); }
};
struct TableDeleter {
  void operator()(rg_table* t) const { rg_table_free(t); }
};
struct DatasetDeleter {
  void operator()(rg_dataset* d) const { rg_dataset_free(d); }
};
using ConfigPtr = std::unique_ptr<rg_config, ConfigDeleter>;
using TablePtr = std::unique_ptr<rg_table, TableDeleter>;
using DatasetPtr = std::unique_ptr<rg_dataset, DatasetDeleter>;

std::string take_string(char* s) {
  std::string out = s == nullptr ? "" : s;
  rg_string_free(s);
  return out;
}

// "path" or "path:format".
std::pair<std::string, std::string> split_benchmark(const std::string& spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size()) return {spec, "tsv"};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

// Flags shared by the commands that train.
struct ConfigFlags {
  std::string config_path;
  std::string preset;
  std::string x_path;
  std::string y_path;
  std::string constraints;
  std::vector<std::string> benchmarks;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> total_batches;
  std::optional<std::uint64_t> batch_size;
  std::optional<std::uint64_t> eval_every;
  std::string eval_mode;
  std::vector<std::string> overrides;
  bool quiet = false;

  void add_to(CLI::App* cmd) {
    cmd->footer(rg_config_reference());
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--preset", preset, "paper-default | tuned | desk (applied before --config)");
    cmd->add_option("--x", x_path, "distributional embeddings (domain X)");
    cmd->add_option("--y", y_path, "retrofitted embeddings (domain Y)");
    cmd->add_option("--constraints", constraints, "constraint word list; restricts training pairs");
    cmd->add_option("--benchmark", benchmarks, "similarity benchmark PATH[:FORMAT], repeatable")
        ->take_all();
    cmd->add_option("--seed", seed, "train.seed");
    cmd->add_option("--total-batches", total_batches, "train.total_batches");
    cmd->add_option("--batch-size", batch_size, "train.batch_size");
    cmd->add_option("--eval-every", eval_every, "train.eval_every");
    cmd->add_option("--eval-mode", eval_mode, "all | disjoint | full");
    cmd->add_option("--set", overrides, "override SECTION.KEY=VALUE, repeatable")->take_all();
    cmd->add_flag("--quiet", quiet, "no progress on standard error");
  }

  // Precedence: flags > config file > preset > built-in default.
  ConfigPtr build() const {
    rg_config* raw = nullptr;
    if (!config_path.empty() && preset.empty()) {
      check(rg_config_load_file(config_path.c_str(), &raw));
    } else {
      check(rg_config_create(preset.empty() ? nullptr : preset.c_str(), &raw));
    }
    ConfigPtr config(raw);
    // --preset beats the file's own "preset" key; the file's other keys
    // still apply on top of it.
    if (!config_path.empty() && !preset.empty()) apply_file(config.get(), config_path);
    if (!x_path.empty()) set(config.get(), "data.x_embeddings", x_path);
    if (!y_path.empty()) set(config.get(), "data.y_embeddings", y_path);
    if (!constraints.empty()) set(config.get(), "data.constraints", constraints);
    if (!benchmarks.empty()) {
      nlohmann::json list = nlohmann::json::array();
      for (const auto& b : benchmarks) {
        const auto [path, format] = split_benchmark(b);
        list.push_back({{"path", path}, {"format", format}});
      }
      set(config.get(), "data.benchmarks", list.dump());
    }
    if (seed) set(config.get(), "train.seed", std::to_string(*seed));
    if (total_batches) set(config.get(), "train.total_batches", std::to_string(*total_batches));
    if (batch_size) set(config.get(), "train.batch_size", std::to_string(*batch_size));
    if (eval_every) set(config.get(), "train.eval_every", std::to_string(*eval_every));
    if (!eval_mode.empty()) set(config.get(), "data.eval_mode", eval_mode);
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) usage_error("--set expects SECTION.KEY=VALUE, got '" + o + "'");
      set(config.get(), o.substr(0, eq), o.substr(eq + 1));
    }
    return config;
  }

  static void set(rg_config* c, const std::string& key, const std::string& value) {
    check(rg_config_set(c, key.c_str(), value.c_str()));
  }
  static void apply_file(rg_config* config, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (f == nullptr) usage_error("cannot open config '" + path + "'");
    std::string text;
    char buf[4096];
    for (std::size_t n; (n = std::fread(buf, 1, sizeof(buf), f)) > 0;) text.append(buf, n);
    std::fclose(f);
    const auto j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) usage_error("config '" + path + "' is not a JSON object");
    for (const auto& [section, body] : j.items()) {
      if (section == "preset") continue;
      if (!body.is_object()) usage_error("config section '" + section + "' must be an object");
      for (const auto& [key, value] : body.items()) set(config, section + "." + key, value.dump());
    }
  }
};

rg_synthetic_options synthetic_defaults() {
  rg_synthetic_options o;
  rg_synthetic_options_default(&o);
  return o;
}

void add_synthetic_flags(CLI::App* cmd, rg_synthetic_options& o) {
  cmd->add_option("--vocab-size", o.vocab_size, "number of words")->capture_default_str();
  cmd->add_option("--clusters", o.n_clusters, "number of synonym clusters")->capture_default_str();
  cmd->add_option("--collapse", o.collapse_strength, "pull toward the cluster mean, in [0, 1]")
      ->capture_default_str();
  cmd->add_option("--antonyms", o.antonym_fraction, "share of words in antonym pairs")->capture_default_str();
  cmd->add_option("--spread", o.spread, "within-cluster noise scale")->capture_default_str();
  cmd->add_option("--pairs", o.n_pairs, "benchmark pairs")->capture_default_str();
  cmd->add_option("--coverage", o.constraint_coverage, "share of words in the constraint list")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RetroGAN: adversarial post-specialization of word embeddings"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rg_version()));

  // train
  ConfigFlags train_flags;
  std::string train_out;
  bool synthetic = false;
  rg_synthetic_options train_synth = synthetic_defaults();
  train_synth.constraint_coverage = 0.8;
  auto* train = app.add_subcommand("train", "train a model and write checkpoints, log and report");
  train_flags.add_to(train);
  train->add_option("--out", train_out, "output directory")->required();
  train->add_flag("--synthetic", synthetic, "generate a synthetic corpus into OUT/synthetic and train on it");
  add_synthetic_flags(train, train_synth);

  // postspecialize
  std::string ps_checkpoint, ps_input, ps_output;
  auto* ps = app.add_subcommand("postspecialize", "apply a trained G to an embedding table");
  ps->add_option("--checkpoint", ps_checkpoint, "checkpoint file")->required();
  ps->add_option("--input", ps_input, "input embedding table")->required();
  ps->add_option("--output", ps_output, "output embedding table")->required();

  // evaluate
  std::string ev_table, ev_constraints, ev_mode = "all", ev_missing = "skip";
  std::vector<std::string> ev_benchmarks;
  auto* ev = app.add_subcommand("evaluate", "Spearman rho of a table on similarity benchmarks");
  ev->add_option("--table", ev_table, "embedding table")->required();
  ev->add_option("--benchmark", ev_benchmarks, "benchmark PATH[:FORMAT], repeatable")->required()->take_all();
  ev->add_option("--constraints", ev_constraints, "constraint word list for the split");
  ev->add_option("--mode", ev_mode, "all | disjoint | full")->capture_default_str();
  ev->add_option("--missing-policy", ev_missing, "skip | zero")->capture_default_str();

  // neighbors
  std::string nb_table, nb_word;
  std::size_t nb_k = 10;
  auto* nb = app.add_subcommand("neighbors", "nearest neighbours by cosine");
  nb->add_option("--table", nb_table, "embedding table")->required();
  nb->add_option("--word", nb_word, "query word")->required();
  nb->add_option("-k", nb_k, "number of neighbours (query included)")->capture_default_str();

  // ook
  ConfigFlags ook_flags;
  std::string ook_out;
  std::vector<double> ook_fractions = {0.05, 0.10, 0.25, 0.50, 0.75, 1.00};
  std::size_t ook_jobs = 1;
  auto* ook = app.add_subcommand("ook", "out-of-knowledge scalability grid");
  ook_flags.add_to(ook);
  ook->add_option("--out", ook_out, "output directory")->required();
  ook->add_option("--fractions", ook_fractions, "fractions of benchmark words released")
      ->delimiter(',')
      ->capture_default_str();
  ook->add_option("--jobs", ook_jobs, "concurrent trainings")->capture_default_str();

  // ablate
  ConfigFlags ab_flags;
  std::string ab_out, ab_mode = "toggle";
  std::size_t ab_jobs = 1;
  auto* ab = app.add_subcommand("ablate", "train with losses switched off");
  ab_flags.add_to(ab);
  ab->add_option("--out", ab_out, "output directory")->required();
  ab->add_option("--mode", ab_mode, "toggle | one_by_one")->capture_default_str();
  ab->add_option("--jobs", ab_jobs, "concurrent trainings")->capture_default_str();

  // gen-synthetic
  rg_synthetic_options gen = synthetic_defaults();
  std::string gen_out;
  auto* gs = app.add_subcommand("gen-synthetic", "write a synthetic paired corpus and benchmark");
  gs->add_option("--out", gen_out, "output directory")->required();
  gs->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  gs->add_option("--dim", gen.dim, "vector dimension")->capture_default_str();
  add_synthetic_flags(gs, gen);
  app.footer(rg_config_reference());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*train) {
      ConfigPtr config = train_flags.build();
      if (synthetic) {
        if (train_flags.seed) train_synth.seed = *train_flags.seed;
        const std::string dir = train_out + "/synthetic";
        check(rg_synthetic_attach(config.get(), &train_synth, dir.c_str()));
      }
      char* summary = nullptr;
      check(rg_train_run(config.get(), train_out.c_str(), train_flags.quiet ? 0 : 1, &summary));
      std::cout << take_string(summary) << '\n';
    } else if (*ps) {
      check(rg_postspecialize_file(ps_checkpoint.c_str(), ps_input.c_str(), ps_output.c_str()));
    } else if (*ev) {
      rg_table* raw = nullptr;
      check(rg_table_load(ev_table.c_str(), 0, &raw));
      TablePtr table(raw);
      for (const auto& spec : ev_benchmarks) {
        const auto [path, format] = split_benchmark(spec);
        rg_dataset* d = nullptr;
        check(rg_dataset_load(path.c_str(), format.c_str(), nullptr, &d));
        DatasetPtr dataset(d);
        char* line = nullptr;
        check(rg_evaluate(table.get(), dataset.get(), ev_constraints.empty() ? nullptr : ev_constraints.c_str(),
                          ev_mode.c_str(), ev_missing.c_str(), nullptr, &line));
        std::cout << take_string(line) << '\n';
      }
    } else if (*nb) {
      rg_table* raw = nullptr;
      check(rg_table_load(nb_table.c_str(), 0, &raw));
      TablePtr table(raw);
      std::vector<const char*> words(nb_k);
      std::vector<double> cosines(nb_k);
      check(rg_table_neighbors(table.get(), nb_word.c_str(), nb_k, words.data(), cosines.data()));
      for (std::size_t i = 0; i < nb_k; ++i) std::printf("%s\t%.6f\n", words[i], cosines[i]);
    } else if (*ook) {
      ConfigPtr config = ook_flags.build();
      char* summary = nullptr;
      check(rg_ook_run(config.get(), ook_fractions.data(), ook_fractions.size(), ook_out.c_str(), ook_jobs,
                       ook_flags.quiet ? 0 : 1, &summary));
      std::cout << take_string(summary) << '\n';
    } else if (*ab) {
      ConfigPtr config = ab_flags.build();
      char* summary = nullptr;
      check(rg_ablate_run(config.get(), ab_mode.c_str(), ab_out.c_str(), ab_jobs, ab_flags.quiet ? 0 : 1,
                          &summary));
      std::cout << take_string(summary) << '\n';
    } else if (*gs) {
      check(rg_synthetic_generate(&gen, gen_out.c_str()));
    }
  } catch (const CommandFailed& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "retrogan: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
