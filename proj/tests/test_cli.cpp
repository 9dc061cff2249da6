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


// Spawns the retrogan executable and checks outputs and exit codes.

#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "retrogan/checkpoint.hpp"
#include "retrogan/embeddings.hpp"
#include "retrogan/evaluation.hpp"
#include "retrogan/run_config.hpp"
#include "support.hpp"

using namespace retrogan;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::string& args) {
  const auto err_path = std::filesystem::temp_directory_path() / "retrogan_cli_stderr.txt";
  const std::string cmd = std::string(RETROGAN_CLI) + " " + args + " 2> " + err_path.string();
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_path);
  r.err.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  return r;
}

std::string q(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) n += !line.empty();
  return n;
}

// Small synthetic corpus shared by the command tests.
const std::filesystem::path& corpus_dir() {
  static const std::filesystem::path dir = [] {
    const auto d = testing::scratch_dir("cli_corpus");
    const Run r = run("gen-synthetic --out " + q(d) +
                      " --seed 3 --dim 8 --vocab-size 150 --clusters 6 --pairs 200 --coverage 0.7");
    REQUIRE(r.code == 0);
    return d;
  }();
  return dir;
}

std::string tiny_flags() {
  const auto& d = corpus_dir();
  return " --preset desk --x " + q(d / "x.vec") + " --y " + q(d / "y.vec") + " --constraints " +
         q(d / "constraints.txt") + " --benchmark " + q(d / "benchmark.tsv") + ":tsv" +
         " --set architecture.dim=8 architecture.generator_size=12 architecture.discriminator_size=12" +
         " --batch-size 8 --quiet";
}

}  // namespace

TEST_CASE("help and usage errors") {
  CHECK(run("--help").code == 0);
  const Run help = run("train --help");
  CHECK(help.code == 0);
  CHECK(help.out.find("train.g_lr") != std::string::npos);
  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("train").code == 2);
  CHECK(run("train --out /tmp/x --total-batches many").code == 2);
}

TEST_CASE("gen-synthetic writes the corpus") {
  const auto& d = corpus_dir();
  for (const char* f : {"x.vec", "y.vec", "constraints.txt", "benchmark.tsv", "options.json"})
    CHECK(std::filesystem::exists(d / f));
  CHECK(load_table(d / "x.vec").table.size() == 150);
  CHECK(run("gen-synthetic --out " + q(testing::scratch_dir("cli_bad_gen")) + " --collapse 2").code == 2);
}

TEST_CASE("train writes artifacts and reports input errors") {
  const auto out = testing::scratch_dir("cli_train");
  const Run r = run("train --out " + q(out / "run") + tiny_flags() + " --total-batches 5 --eval-every 5");
  CHECK(r.code == 0);
  const auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["steps"] == 5);
  for (const char* f : {"config.json", "final.ckpt", "best.ckpt", "train_log.jsonl", "eval_report.jsonl"})
    CHECK(std::filesystem::exists(out / "run" / f));

  const Run zero = run("train --out " + q(out / "zero") + tiny_flags() + " --total-batches 0");
  CHECK(zero.code == 0);
  CHECK(load_checkpoint(out / "zero" / "final.ckpt").state.step == 0);

  const Run missing = run("train --out " + q(out / "m") + " --preset desk --x /nonexistent/x.vec --y " +
                          q(corpus_dir() / "y.vec"));
  CHECK(missing.code == 2);
  CHECK(missing.err.find("/nonexistent/x.vec") != std::string::npos);
  CHECK(missing.out.empty());

  CHECK(run("train --out " + q(out / "k") + tiny_flags() + " --set train.bogus=1").code == 2);
  CHECK(run("train --out " + q(out / "c") + tiny_flags() + " --config /nonexistent.json").code == 2);
}

TEST_CASE("same seed gives identical checkpoints") {
  const auto out = testing::scratch_dir("cli_repro");
  const std::string flags = tiny_flags() + " --total-batches 4 --seed 11";
  REQUIRE(run("train --out " + q(out / "a") + flags).code == 0);
  REQUIRE(run("train --out " + q(out / "b") + flags).code == 0);
  auto bytes = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  };
  CHECK(bytes(out / "a" / "final.ckpt") == bytes(out / "b" / "final.ckpt"));
}

TEST_CASE("config file with preset and flag overrides") {
  const auto out = testing::scratch_dir("cli_config");
  std::ofstream(out / "cfg.json") << R"({"train": {"seed": 5, "total_batches": 9}})";
  const Run r = run("train --out " + q(out / "run") + tiny_flags() + " --config " + q(out / "cfg.json") +
                    " --total-batches 3");
  REQUIRE(r.code == 0);
  const RunConfig rc = load_run_config(out / "run" / "config.json");
  CHECK(rc.train.seed == 5);
  CHECK(rc.train.total_batches == 3);
  CHECK(rc.train.architecture.dim == 8);
  CHECK(rc.preset == "desk");
}

TEST_CASE("postspecialize") {
  const auto out = testing::scratch_dir("cli_post");
  // Identity generator: relu(x) - relu(-x).
  TrainConfig c = TrainConfig::desk();
  c.architecture.dim = 8;
  c.architecture.generator_size = 16;
  TrainerState s = initial_state(c);
  auto& p = s.model.g.params();
  p[0].weight = Matrix(8, 16);
  p[3].weight = Matrix::identity(16);
  p[6].weight = Matrix(16, 8);
  for (std::size_t i = 0; i < 8; ++i) {
    p[0].weight(i, i) = 1.0;
    p[0].weight(i, 8 + i) = -1.0;
    p[6].weight(i, i) = 1.0;
    p[6].weight(8 + i, i) = -1.0;
  }
  save_checkpoint(s, c, out / "id.ckpt");
  const auto x = corpus_dir() / "x.vec";
  const Run r = run("postspecialize --checkpoint " + q(out / "id.ckpt") + " --input " + q(x) +
                    " --output " + q(out / "post.vec"));
  CHECK(r.code == 0);
  const EmbeddingTable in = preprocess(load_table(x).table);
  const EmbeddingTable post = load_table(out / "post.vec").table;
  CHECK(post.words() == in.words());
  CHECK(post.vectors() == in.vectors());

  std::ofstream(out / "wide.vec") << "a 1 2 3\nb 3 2 1\n";
  CHECK(run("postspecialize --checkpoint " + q(out / "id.ckpt") + " --input " + q(out / "wide.vec") +
            " --output " + q(out / "o.vec")).code == 2);
  CHECK(run("postspecialize --checkpoint " + q(out / "wide.vec") + " --input " + q(x) + " --output " +
            q(out / "o.vec")).code == 2);
}

TEST_CASE("evaluate") {
  const auto out = testing::scratch_dir("cli_eval");
  std::ofstream(out / "t.vec") << "a 1 0\nb 0.9 0.1\nc 0.5 0.5\nd 0 1\n";
  std::ofstream(out / "bench.tsv") << "a\tb\t9\na\tc\t6\na\td\t1\nb\td\t2\n";
  std::ofstream(out / "cons.txt") << "a\nb\n";
  const Run r = run("evaluate --table " + q(out / "t.vec") + " --benchmark " + q(out / "bench.tsv"));
  REQUIRE(r.code == 0);
  const auto rep = nlohmann::json::parse(r.out);
  CHECK(rep["rho"] == 1.0);
  CHECK(rep["evaluated"] == 4);
  CHECK(rep["skipped"] == 0);
  CHECK(rep["dataset"] == "bench");
  CHECK(rep["mode"] == "all");

  const Run dis = run("evaluate --table " + q(out / "t.vec") + " --benchmark " + q(out / "bench.tsv") +
                      " --mode disjoint");
  REQUIRE(dis.code == 0);
  CHECK(nlohmann::json::parse(dis.out)["evaluated"] == 4);

  const Run two = run("evaluate --table " + q(out / "t.vec") + " --benchmark " + q(out / "bench.tsv") +
                      " " + q(out / "bench.tsv") + ":0,1,2,0 --constraints " + q(out / "cons.txt") +
                      " --mode full --missing-policy zero");
  CHECK(two.code == 2);  // one full pair is too few for a correlation
  CHECK(run("evaluate --table " + q(out / "t.vec") + " --benchmark " + q(out / "bench.tsv") +
            " --mode sideways").code == 2);
  CHECK(run("evaluate --table " + q(out / "t.vec") + " --benchmark " + q(out / "t.vec")).code == 2);
}

TEST_CASE("neighbors") {
  const auto out = testing::scratch_dir("cli_nn");
  std::ofstream(out / "t.vec") << "a 1 0\nb 0.9 0.1\nc 0.5 0.5\nd 0 1\n";
  const Run r = run("neighbors --table " + q(out / "t.vec") + " --word a -k 3");
  REQUIRE(r.code == 0);
  CHECK(count_lines(r.out) == 3);
  CHECK(r.out.rfind("a\t1.000000\nb\t", 0) == 0);
  CHECK(run("neighbors --table " + q(out / "t.vec") + " --word zz").code == 2);
  CHECK(run("neighbors --table " + q(out / "t.vec") + " --word a -k 9").code == 2);
}

TEST_CASE("ook and ablate") {
  const auto out = testing::scratch_dir("cli_grids");
  const Run o = run("ook --out " + q(out / "ook") + tiny_flags() + " --total-batches 2 --fractions 0.5,1.0 --jobs 2");
  CHECK(o.code == 0);
  std::ifstream grid(out / "ook" / "ook_grid.jsonl");
  std::string text((std::istreambuf_iterator<char>(grid)), std::istreambuf_iterator<char>());
  CHECK(count_lines(text) == 2);
  CHECK(run("ook --out " + q(out / "bad") + tiny_flags() + " --fractions 0").code == 2);

  const Run a = run("ablate --out " + q(out / "ab") + tiny_flags() + " --total-batches 2 --mode toggle");
  CHECK(a.code == 0);
  CHECK(nlohmann::json::parse(a.out).size() == 6);
  CHECK(run("ablate --out " + q(out / "ab2") + tiny_flags() + " --mode sometimes").code == 2);
}
