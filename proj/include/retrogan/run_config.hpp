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

// Run configuration files. JSON with five sections whose keys match the
// TrainConfig / ArchitectureConfig / LossWeights / Toggles fields:
//
//   {
//     "preset": "paper-default",
//     "train":        {"g_lr": 5e-05, "batch_size": 32, ...},
//     "toggles":      {"one_way_mm": true, ...},
//     "loss_weights": {"lambda_cyc": 1.0, ...},
//     "architecture": {"dim": 300, ...},
//     "data":         {"x_embeddings": "...", "benchmarks": [...], ...}
//   }
//
// Unknown sections or keys are rejected. Values are applied on top of the
// preset, so a file only needs the keys it changes.

#ifndef RETROGAN_RUN_CONFIG_HPP
#define RETROGAN_RUN_CONFIG_HPP

#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "retrogan/trainer.hpp"

namespace retrogan {

struct BenchmarkSpec {
  std::string path;
  std::string format = "tsv";  // see dataset_format()
  std::string name;            // defaults to the file stem

  bool operator==(const BenchmarkSpec&) const = default;
};

struct DataConfig {
  std::string x_embeddings;
  std::string y_embeddings;
  std::string constraints;
  std::vector<BenchmarkSpec> benchmarks;
  bool normalize_targets = true;
  std::string missing_policy = "skip";  // skip | zero
  std::string eval_mode = "all";        // all | disjoint | full

  bool operator==(const DataConfig&) const = default;
};

struct RunConfig {
  std::string preset = "paper-default";
  TrainConfig train = TrainConfig::paper_default();
  DataConfig data;

  bool operator==(const RunConfig&) const = default;
};

nlohmann::json to_json(const TrainConfig& config);
nlohmann::json to_json(const RunConfig& config);

// Applies the train/toggles/loss_weights/architecture sections of `j` on top
// of `base`.
TrainConfig train_config_from_json(const nlohmann::json& j, TrainConfig base);

// A "preset" key, if present, resets everything to that preset before the
// remaining keys are applied.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

// "section.key" = value, where value is JSON text or a bare string, e.g.
// set_config_value(cfg, "train.batch_size", "64").
void set_config_value(RunConfig& config, const std::string& dotted_key, const std::string& value);

// One line per key with its default, for --help.
std::string config_reference();

}  // namespace retrogan

#endif  // RETROGAN_RUN_CONFIG_HPP
