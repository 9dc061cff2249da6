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

#include "retrogan/run_config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace retrogan {

using nlohmann::json;

namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<json(const RunConfig&)> get;
  std::function<void(RunConfig&, const json&)> set;
};

[[noreturn]] void bad_value(const std::string& where, const json& v, const char* expected) {
  fail(ErrorCode::kConfig, where + ": expected " + expected + ", got " + v.dump());
}

double as_double(const std::string& where, const json& v) {
  if (!v.is_number()) bad_value(where, v, "a number");
  return v.get<double>();
}

std::uint64_t as_uint(const std::string& where, const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return v.get<std::uint64_t>();
  bad_value(where, v, "a non-negative integer");
}

bool as_bool(const std::string& where, const json& v) {
  if (!v.is_boolean()) bad_value(where, v, "true or false");
  return v.get<bool>();
}

std::string as_string(const std::string& where, const json& v) {
  if (!v.is_string()) bad_value(where, v, "a string");
  return v.get<std::string>();
}

std::string one_of(const std::string& where, const json& v, std::initializer_list<const char*> options) {
  const std::string s = as_string(where, v);
  for (const char* o : options) {
    if (s == o) return s;
  }
  std::string list;
  for (const char* o : options) list += std::string(list.empty() ? "" : ", ") + o;
  fail(ErrorCode::kConfig, where + ": '" + s + "' is not one of " + list);
}

#define RG_DOUBLE(sec, name, expr)                                                    \
  Field{sec, name, [](const RunConfig& c) { return json(c.expr); },                   \
        [](RunConfig& c, const json& v) { c.expr = as_double(sec "." name, v); }}
#define RG_UINT(sec, name, expr)                                                      \
  Field{sec, name, [](const RunConfig& c) { return json(c.expr); },                   \
        [](RunConfig& c, const json& v) {                                             \
          c.expr = static_cast<decltype(c.expr)>(as_uint(sec "." name, v));           \
        }}
#define RG_BOOL(sec, name, expr)                                                      \
  Field{sec, name, [](const RunConfig& c) { return json(c.expr); },                   \
        [](RunConfig& c, const json& v) { c.expr = as_bool(sec "." name, v); }}
#define RG_STRING(sec, name, expr)                                                    \
  Field{sec, name, [](const RunConfig& c) { return json(c.expr); },                   \
        [](RunConfig& c, const json& v) { c.expr = as_string(sec "." name, v); }}

json benchmarks_to_json(const std::vector<BenchmarkSpec>& specs) {
  json out = json::array();
  for (const auto& b : specs) out.push_back({{"path", b.path}, {"format", b.format}, {"name", b.name}});
  return out;
}

std::vector<BenchmarkSpec> benchmarks_from_json(const json& v) {
  if (!v.is_array()) bad_value("data.benchmarks", v, "an array");
  std::vector<BenchmarkSpec> out;
  for (const auto& item : v) {
    if (item.is_string()) {
      out.push_back({item.get<std::string>(), "tsv", ""});
      continue;
    }
    if (!item.is_object()) bad_value("data.benchmarks[]", item, "an object or a path");
    BenchmarkSpec spec;
    for (const auto& [key, value] : item.items()) {
      if (key == "path") {
        spec.path = as_string("data.benchmarks[].path", value);
      } else if (key == "format") {
        spec.format = as_string("data.benchmarks[].format", value);
      } else if (key == "name") {
        spec.name = as_string("data.benchmarks[].name", value);
      } else {
        fail(ErrorCode::kConfig, "unknown key 'data.benchmarks[]." + key + "'");
      }
    }
    if (spec.path.empty()) fail(ErrorCode::kConfig, "data.benchmarks[]: missing 'path'");
    out.push_back(std::move(spec));
  }
  return out;
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      RG_DOUBLE("train", "g_lr", train.g_lr),
      RG_DOUBLE("train", "d_lr", train.d_lr),
      RG_UINT("train", "batch_size", train.batch_size),
      RG_UINT("train", "total_batches", train.total_batches),
      RG_UINT("train", "dis_train_amount", train.dis_train_amount),
      RG_BOOL("train", "train_plain_discriminators", train.train_plain_discriminators),
      RG_UINT("train", "seed", train.seed),
      RG_UINT("train", "eval_every", train.eval_every),
      Field{"train", "adversarial",
            [](const RunConfig& c) {
              return json(c.train.adversarial == AdversarialMode::kMinimax ? "minimax"
                                                                          : "non_saturating");
            },
            [](RunConfig& c, const json& v) {
              c.train.adversarial = one_of("train.adversarial", v, {"non_saturating", "minimax"}) ==
                                            "minimax"
                                        ? AdversarialMode::kMinimax
                                        : AdversarialMode::kNonSaturating;
            }},
      Field{"train", "generator_update",
            [](const RunConfig& c) {
              return json(c.train.generator_update == GeneratorUpdate::kAlternating ? "alternating"
                                                                                   : "joint");
            },
            [](RunConfig& c, const json& v) {
              c.train.generator_update =
                  one_of("train.generator_update", v, {"joint", "alternating"}) == "alternating"
                      ? GeneratorUpdate::kAlternating
                      : GeneratorUpdate::kJoint;
            }},

      RG_BOOL("toggles", "one_way_mm", train.toggles.one_way_mm),
      RG_BOOL("toggles", "cycle_mm", train.toggles.cycle_mm),
      RG_BOOL("toggles", "cycle_dis", train.toggles.cycle_dis),
      RG_BOOL("toggles", "id_loss", train.toggles.id_loss),
      RG_BOOL("toggles", "cycle_loss", train.toggles.cycle_loss),
      RG_BOOL("toggles", "gan_loss", train.toggles.gan_loss),

      RG_DOUBLE("loss_weights", "lambda_cyc", train.weights.lambda_cyc),
      RG_DOUBLE("loss_weights", "gamma_id", train.weights.gamma_id),
      RG_DOUBLE("loss_weights", "sigma_ccyc", train.weights.sigma_ccyc),
      RG_DOUBLE("loss_weights", "delta_mm", train.weights.delta_mm),
      RG_UINT("loss_weights", "k_confounders", train.weights.k_confounders),

      RG_UINT("architecture", "dim", train.architecture.dim),
      RG_UINT("architecture", "generator_size", train.architecture.generator_size),
      RG_UINT("architecture", "generator_hidden_layers", train.architecture.generator_hidden_layers),
      RG_DOUBLE("architecture", "generator_dropout", train.architecture.generator_dropout),
      RG_UINT("architecture", "discriminator_size", train.architecture.discriminator_size),
      RG_UINT("architecture", "discriminator_hidden_layers",
              train.architecture.discriminator_hidden_layers),
      RG_DOUBLE("architecture", "discriminator_dropout", train.architecture.discriminator_dropout),
      RG_DOUBLE("architecture", "batchnorm_epsilon", train.architecture.batchnorm.epsilon),
      RG_DOUBLE("architecture", "batchnorm_momentum", train.architecture.batchnorm.momentum),

      RG_STRING("data", "x_embeddings", data.x_embeddings),
      RG_STRING("data", "y_embeddings", data.y_embeddings),
      RG_STRING("data", "constraints", data.constraints),
      Field{"data", "benchmarks", [](const RunConfig& c) { return benchmarks_to_json(c.data.benchmarks); },
            [](RunConfig& c, const json& v) { c.data.benchmarks = benchmarks_from_json(v); }},
      RG_BOOL("data", "normalize_targets", data.normalize_targets),
      Field{"data", "missing_policy", [](const RunConfig& c) { return json(c.data.missing_policy); },
            [](RunConfig& c, const json& v) {
              c.data.missing_policy = one_of("data.missing_policy", v, {"skip", "zero"});
            }},
      Field{"data", "eval_mode", [](const RunConfig& c) { return json(c.data.eval_mode); },
            [](RunConfig& c, const json& v) {
              c.data.eval_mode = one_of("data.eval_mode", v, {"all", "disjoint", "full"});
            }},
  };
  return table;
}

#undef RG_DOUBLE
#undef RG_UINT
#undef RG_BOOL
#undef RG_STRING

constexpr const char* kSections[] = {"train", "toggles", "loss_weights", "architecture", "data"};

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

bool is_section(const std::string& name) {
  for (const char* s : kSections) {
    if (name == s) return true;
  }
  return false;
}

void apply_sections(RunConfig& config, const json& j, bool allow_data) {
  for (const auto& [section, body] : j.items()) {
    if (section == "preset") continue;
    if (!is_section(section) || (!allow_data && section == "data")) {
      fail(ErrorCode::kConfig, "unknown config section '" + section + "'");
    }
    if (!body.is_object()) bad_value(section, body, "an object");
    for (const auto& [key, value] : body.items()) {
      const Field* f = find_field(section, key);
      if (f == nullptr) fail(ErrorCode::kConfig, "unknown config key '" + section + "." + key + "'");
      f->set(config, value);
    }
  }
}

json sections_json(const RunConfig& config, bool with_data) {
  json out = json::object();
  for (const auto& f : fields()) {
    if (!with_data && std::string(f.section) == "data") continue;
    out[f.section][f.key] = f.get(config);
  }
  return out;
}

}  // namespace

json to_json(const TrainConfig& config) {
  RunConfig rc;
  rc.train = config;
  return sections_json(rc, false);
}

json to_json(const RunConfig& config) {
  json out = sections_json(config, true);
  out["preset"] = config.preset;
  return out;
}

TrainConfig train_config_from_json(const json& j, TrainConfig base) {
  if (!j.is_object()) bad_value("config", j, "an object");
  RunConfig rc;
  rc.train = std::move(base);
  apply_sections(rc, j, false);
  return rc.train;
}

RunConfig run_config_from_json(const json& j, RunConfig base) {
  if (!j.is_object()) bad_value("config", j, "an object");
  if (j.contains("preset")) {
    const std::string name = as_string("preset", j.at("preset"));
    base.train = TrainConfig::preset(name);
    base.preset = name;
  }
  apply_sections(base, j, true);
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open config '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::kParse, path.string() + ": " + e.what());
  }
  return run_config_from_json(j, std::move(base));
}

void set_config_value(RunConfig& config, const std::string& dotted_key, const std::string& value) {
  if (dotted_key == "preset") {
    config.train = TrainConfig::preset(value);
    config.preset = value;
    return;
  }
  const auto dot = dotted_key.find('.');
  if (dot == std::string::npos) fail(ErrorCode::kConfig, "config key '" + dotted_key + "' needs a section");
  const Field* f = find_field(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (f == nullptr) fail(ErrorCode::kConfig, "unknown config key '" + dotted_key + "'");
  json v = json::parse(value, nullptr, false);
  if (v.is_discarded()) v = value;
  f->set(config, v);
}

std::string config_reference() {
  const RunConfig defaults;
  std::ostringstream out;
  out << "Config keys (paper-default values):\n";
  for (const auto& f : fields()) {
    out << "  " << f.section << '.' << f.key << " = " << f.get(defaults).dump() << '\n';
  }
  return out.str();
}

}  // namespace retrogan
