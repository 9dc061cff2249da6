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


#include <doctest.h>

#include <fstream>

#include "retrogan/error.hpp"
#include "retrogan/run_config.hpp"
#include "support.hpp"

using namespace retrogan;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

}  // namespace

TEST_CASE("json round trip of a full run configuration") {
  RunConfig rc;
  rc.preset = "tuned";
  rc.train = TrainConfig::tuned();
  rc.train.seed = 17;
  rc.train.toggles.cycle_mm = false;
  rc.train.weights.k_confounders = 5;
  rc.train.adversarial = AdversarialMode::kMinimax;
  rc.train.generator_update = GeneratorUpdate::kAlternating;
  rc.data.x_embeddings = "x.vec";
  rc.data.benchmarks = {{"sl.txt", "simlex", "SL"}};
  rc.data.eval_mode = "disjoint";
  const json j = to_json(rc);
  CHECK(j["train"]["adversarial"] == "minimax");
  CHECK(j["toggles"]["cycle_mm"] == false);
  CHECK(run_config_from_json(j) == rc);
  CHECK(train_config_from_json(to_json(rc.train), TrainConfig{}) == rc.train);
}

TEST_CASE("preset key resets before applying overrides") {
  const json j = {{"preset", "desk"}, {"train", {{"batch_size", 16}}}};
  const RunConfig rc = run_config_from_json(j);
  CHECK(rc.preset == "desk");
  CHECK(rc.train.architecture.dim == 32);
  CHECK(rc.train.batch_size == 16);
}

TEST_CASE("unknown sections, keys and bad values are config errors") {
  CHECK(code_of([] { run_config_from_json({{"trian", json::object()}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"train", {{"lr", 1}}}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"train", {{"batch_size", "big"}}}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"train", {{"batch_size", -3}}}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"train", {{"adversarial", "wgan"}}}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"preset", "huge"}}); }) == ErrorCode::kConfig);
  CHECK(code_of([] { run_config_from_json({{"data", {{"benchmarks", {{{"format", "tsv"}}}}}}}); }) ==
        ErrorCode::kConfig);
  CHECK(code_of([] { train_config_from_json({{"data", json::object()}}, {}); }) == ErrorCode::kConfig);
}

TEST_CASE("benchmarks accept plain paths") {
  const RunConfig rc = run_config_from_json({{"data", {{"benchmarks", {"a.tsv"}}}}});
  REQUIRE(rc.data.benchmarks.size() == 1);
  CHECK(rc.data.benchmarks[0].path == "a.tsv");
  CHECK(rc.data.benchmarks[0].format == "tsv");
}

TEST_CASE("dotted set accepts json or bare strings") {
  RunConfig rc;
  set_config_value(rc, "train.batch_size", "64");
  set_config_value(rc, "loss_weights.gamma_id", "0.5");
  set_config_value(rc, "toggles.id_loss", "false");
  set_config_value(rc, "data.x_embeddings", "some/path.vec");
  set_config_value(rc, "train.generator_update", "alternating");
  CHECK(rc.train.batch_size == 64);
  CHECK(rc.train.weights.gamma_id == 0.5);
  CHECK(!rc.train.toggles.id_loss);
  CHECK(rc.data.x_embeddings == "some/path.vec");
  CHECK(rc.train.generator_update == GeneratorUpdate::kAlternating);
  CHECK(code_of([&] { set_config_value(rc, "batch_size", "3"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { set_config_value(rc, "train.nope", "3"); }) == ErrorCode::kConfig);
  CHECK(code_of([&] { set_config_value(rc, "train.batch_size", "x"); }) == ErrorCode::kConfig);
  set_config_value(rc, "preset", "tuned");
  CHECK(rc.train == TrainConfig::tuned());
}

TEST_CASE("config files") {
  const auto dir = testing::scratch_dir("run_config");
  std::ofstream(dir / "ok.json") << R"({"preset": "desk", "train": {"seed": 4}})";
  std::ofstream(dir / "bad.json") << R"({"train": {"seed": 4})";
  CHECK(load_run_config(dir / "ok.json").train.seed == 4);
  CHECK(code_of([&] { load_run_config(dir / "bad.json"); }) == ErrorCode::kParse);
  CHECK(code_of([&] { load_run_config(dir / "none.json"); }) == ErrorCode::kIo);
}

TEST_CASE("reference lists every key") {
  const std::string ref = config_reference();
  for (const char* key : {"train.g_lr", "toggles.one_way_mm", "loss_weights.delta_mm",
                          "architecture.generator_size", "data.eval_mode"}) {
    CHECK(ref.find(key) != std::string::npos);
  }
}
