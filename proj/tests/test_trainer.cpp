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

#include <algorithm>
#include <set>
#include <sstream>

#include "retrogan/error.hpp"
#include "retrogan/trainer.hpp"
#include "retrogan/synthetic.hpp"
#include "retrogan/workflows.hpp"
#include "support.hpp"

using namespace retrogan;

namespace {

PairedCorpus toy_corpus(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  PairedCorpus c;
  for (std::size_t i = 0; i < n; ++i) c.words.push_back("w" + std::to_string(1000 + i));
  c.x = testing::random_unit_rows(rng, n, d);
  c.y = testing::random_unit_rows(rng, n, d);
  return c;
}

TrainConfig small_run(std::uint64_t steps) {
  TrainConfig c = testing::toy_config();
  c.total_batches = steps;
  c.train_plain_discriminators = true;
  return c;
}

}  // namespace

TEST_CASE("identical seeds give identical runs") {
  const PairedCorpus corpus = toy_corpus(40, 8, 1);
  const TrainConfig c = small_run(12);
  const TrainResult a = train(corpus, c);
  const TrainResult b = train(corpus, c);
  CHECK(a.final_state == b.final_state);
  CHECK(a.log.steps == b.log.steps);
  TrainConfig other = c;
  other.seed = 1;
  CHECK(!(train(corpus, other).final_state == a.final_state));
}

TEST_CASE("resuming equals an uninterrupted run") {
  const PairedCorpus corpus = toy_corpus(30, 8, 2);  // 3 full batches per epoch
  const TrainConfig full = small_run(11);
  TrainConfig first = full;
  first.total_batches = 5;
  const TrainResult head = train(corpus, first);
  CHECK(head.final_state.step == 5);
  TrainOptions resume;
  resume.resume_from = head.final_state;
  const TrainResult tail = train(corpus, full, resume);
  const TrainResult whole = train(corpus, full);
  CHECK(tail.final_state == whole.final_state);
  REQUIRE(tail.log.steps.size() == 6);
  CHECK(tail.log.steps.front().step == 6);
  CHECK(tail.log.steps.back() == whole.log.steps.back());
}

TEST_CASE("resume rejects a different architecture or seed") {
  const PairedCorpus corpus = toy_corpus(20, 8, 3);
  const TrainConfig c = small_run(2);
  TrainOptions opts;
  opts.resume_from = initial_state(c);
  TrainConfig other = c;
  other.seed = 9;
  CHECK_THROWS_AS(train(corpus, other, opts), Error);
  other = c;
  other.architecture.generator_size = 12;
  try {
    train(corpus, other, opts);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigMismatch);
  }
}

TEST_CASE("a toggled-off loss trains exactly like a zero weight") {
  const PairedCorpus corpus = toy_corpus(24, 8, 4);
  const TrainConfig base = small_run(6);
  struct Case {
    const char* toggle;
    double LossWeights::*weight;
  };
  for (const Case& k : {Case{"cycle_loss", &LossWeights::lambda_cyc},
                        Case{"id_loss", &LossWeights::gamma_id},
                        Case{"cycle_dis", &LossWeights::sigma_ccyc}}) {
    CAPTURE(k.toggle);
    TrainConfig off = base;
    toggle_by_name(off.toggles, k.toggle) = false;
    TrainConfig zero = base;
    zero.weights.*k.weight = 0.0;
    const TrainResult a = train(corpus, off);
    const TrainResult b = train(corpus, zero);
    CHECK(a.final_state.model.g == b.final_state.model.g);
    CHECK(a.final_state.model.f == b.final_state.model.f);
    CHECK(a.final_state.opt_g == b.final_state.opt_g);
    for (std::size_t i = 0; i < a.log.steps.size(); ++i) {
      CHECK(a.log.steps[i].losses.total == b.log.steps[i].losses.total);
    }
  }
}

TEST_CASE("plain discriminators stay fixed unless enabled") {
  const PairedCorpus corpus = toy_corpus(24, 8, 5);
  TrainConfig c = small_run(4);
  c.train_plain_discriminators = false;
  const TrainerState start = initial_state(c);
  const TrainResult r = train(corpus, c);
  CHECK(r.final_state.model.d_x == start.model.d_x);
  CHECK(r.final_state.model.d_y == start.model.d_y);
  CHECK(!(r.final_state.model.d_cx == start.model.d_cx));
  CHECK(!(r.final_state.model.g == start.model.g));
  c.train_plain_discriminators = true;
  CHECK(!(train(corpus, c).final_state.model.d_x == start.model.d_x));
}

TEST_CASE("with every toggle off the generators do not move") {
  const PairedCorpus corpus = toy_corpus(24, 8, 6);
  TrainConfig c = small_run(3);
  c.toggles = Toggles::all_off();
  const TrainerState start = initial_state(c);
  const TrainResult r = train(corpus, c);
  CHECK(r.final_state.model.g.trainable().size() == start.model.g.trainable().size());
  const auto after = r.final_state.model.g.trainable();
  const auto before = start.model.g.trainable();
  for (std::size_t i = 0; i < after.size(); ++i) CHECK(*after[i] == *before[i]);
  const auto fa = r.final_state.model.f.trainable();
  const auto fb = start.model.f.trainable();
  for (std::size_t i = 0; i < fa.size(); ++i) CHECK(*fa[i] == *fb[i]);
  for (const StepRecord& s : r.log.steps) CHECK(s.losses.total == 0.0);
}

TEST_CASE("alternating generator updates and minimax mode run") {
  const PairedCorpus corpus = toy_corpus(24, 8, 7);
  TrainConfig c = small_run(3);
  c.generator_update = GeneratorUpdate::kAlternating;
  c.adversarial = AdversarialMode::kMinimax;
  c.dis_train_amount = 2;
  const TrainResult r = train(corpus, c);
  CHECK(r.final_state.step == 3);
  for (const StepRecord& s : r.log.steps) CHECK(std::isfinite(s.losses.total));
}

TEST_CASE("batches walk a fresh permutation each epoch") {
  const TrainConfig c = small_run(1);  // batch 8
  std::set<std::size_t> seen;
  for (std::uint64_t step = 0; step < 4; ++step) {
    const auto rows = batch_rows(32, c, step);
    CHECK(rows.size() == 8);
    seen.insert(rows.begin(), rows.end());
  }
  CHECK(seen.size() == 32);
  CHECK(batch_rows(32, c, 0) != batch_rows(32, c, 4));
  CHECK(batch_rows(32, c, 5) == batch_rows(32, c, 5));
}

TEST_CASE("step records are numbered from one") {
  const PairedCorpus corpus = toy_corpus(16, 8, 8);
  const TrainResult r = train(corpus, small_run(3));
  REQUIRE(r.log.steps.size() == 3);
  CHECK(r.log.steps[0].step == 1);
  CHECK(r.log.steps[2].step == 3);
}

TEST_CASE("periodic evaluation selects the best snapshot") {
  const PairedCorpus corpus = toy_corpus(16, 8, 9);
  TrainConfig c = small_run(6);
  c.eval_every = 2;
  TrainOptions opts;
  // Peaks at step 4.
  opts.evaluate = [](const RetroGanModel&, std::uint64_t step) {
    return std::map<std::string, double>{{"score", -std::abs(static_cast<double>(step) - 4.0)}};
  };
  const TrainResult r = train(corpus, c, opts);
  REQUIRE(r.log.evals.size() == 3);
  CHECK(r.log.evals[0].step == 2);
  CHECK(r.best_step == 4);
  REQUIRE(r.best_metric);
  CHECK(*r.best_metric == 0.0);
  std::ostringstream out;
  r.log.write_jsonl(out);
  std::size_t lines = 0;
  for (char ch : out.str()) lines += ch == '\n';
  CHECK(lines == 9);
  opts.selection_metric = "missing";
  CHECK_THROWS_AS(train(corpus, c, opts), Error);
}

TEST_CASE("presets") {
  const TrainConfig p = TrainConfig::paper_default();
  CHECK(p.g_lr == 5e-5);
  CHECK(p.d_lr == 1e-4);
  CHECK(p.batch_size == 32);
  CHECK(p.total_batches == 312500);
  CHECK(p.architecture.dim == 300);
  CHECK(p.architecture.generator_size == 2048);
  const TrainConfig t = TrainConfig::preset("tuned");
  CHECK(t.g_lr == 0.00495);
  CHECK(t.d_lr == 0.00885);
  CHECK(t.architecture.generator_hidden_layers == 1);
  CHECK(t.architecture.discriminator_hidden_layers == 3);
  CHECK(TrainConfig::preset("desk").architecture.dim == 32);
  try {
    TrainConfig::preset("huge");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
  }
}

TEST_CASE("config validation") {
  TrainConfig c = testing::toy_config();
  c.batch_size = 1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = testing::toy_config();
  c.g_lr = -1;
  CHECK_THROWS_AS(c.validate(), Error);
  c = testing::toy_config();
  c.weights.k_confounders = 8;  // batch 8 leaves 7 other rows
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("train rejects unusable corpora") {
  const TrainConfig c = small_run(1);
  try {
    train(toy_corpus(1, 8, 1), c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
  }
  try {
    train(toy_corpus(10, 4, 1), c);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimension);
  }
}

TEST_CASE("toy training cuts the cycle loss by a quarter within 500 steps") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    CAPTURE(seed);
    SyntheticOptions so;
    so.seed = seed;
    so.vocab_size = 50;
    so.dim = 8;
    so.n_clusters = 5;
    so.n_pairs = 100;
    const SyntheticCorpus sc = synthesize_paired_corpus(so);
    const PairedCorpus corpus = align_pairs(sc.x, sc.y).corpus;
    REQUIRE(corpus.size() == 50);
    TrainConfig c = testing::toy_config();
    c.total_batches = 500;
    c.seed = seed;
    const auto& steps = train(corpus, c).log.steps;
    double first = 0.0, last = 0.0;
    for (std::size_t i = 0; i < 10; ++i) first += steps[i].losses.cyc / 10.0;
    for (std::size_t i = steps.size() - 10; i < steps.size(); ++i) last += steps[i].losses.cyc / 10.0;
    CHECK(last <= 0.75 * first);
  }
}
