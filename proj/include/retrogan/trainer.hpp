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

// RetroGAN training loop.
//
// One step:
//   1. G(x), F(y), F(G(x)), G(F(y)) and, when the identity loss is on, G(y), F(x).
//   2. Combined objective for the generators; one joint Adam step over G and F.
//   3. dis_train_amount Adam steps on D_cX and D_cY against the detached
//      generator outputs of (1).
//   4. D_X and D_Y only move when train_plain_discriminators is set.
//
// Every random draw is keyed by (seed, step, call site), so a run is a pure
// function of the config and resuming from a checkpoint at step t replays
// the uninterrupted run exactly.

#ifndef RETROGAN_TRAINER_HPP
#define RETROGAN_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "retrogan/embeddings.hpp"
#include "retrogan/losses.hpp"
#include "retrogan/optim.hpp"

namespace retrogan {

enum class GeneratorUpdate {
  kJoint,        // one step over G and F together
  kAlternating,  // step G, recompute, step F
};

struct TrainConfig {
  double g_lr = 5e-5;
  double d_lr = 1e-4;
  std::size_t batch_size = 32;
  std::uint64_t total_batches = 312500;
  LossWeights weights;
  Toggles toggles;
  std::size_t dis_train_amount = 1;
  bool train_plain_discriminators = false;
  std::uint64_t seed = 0;
  ArchitectureConfig architecture;
  std::uint64_t eval_every = 0;  // 0 disables periodic evaluation
  AdversarialMode adversarial = AdversarialMode::kNonSaturating;
  GeneratorUpdate generator_update = GeneratorUpdate::kJoint;

  void validate() const;

  static TrainConfig paper_default();
  // Best configuration from the published hyperparameter search.
  static TrainConfig tuned();
  // Small dense model for synthetic corpora: d = 32, hidden width 64.
  static TrainConfig desk();
  // "paper-default", "tuned" or "desk".
  static TrainConfig preset(const std::string& name);

  bool operator==(const TrainConfig&) const = default;
};

struct TrainerState {
  RetroGanModel model;
  AdamState opt_g;
  AdamState opt_f;
  AdamState opt_d_x;
  AdamState opt_d_y;
  AdamState opt_d_cx;
  AdamState opt_d_cy;
  std::uint64_t step = 0;  // completed training steps
  std::uint64_t seed = 0;

  // Same order as RetroGanModel::networks().
  std::vector<AdamState*> optimizers();
  std::vector<const AdamState*> optimizers() const;

  bool operator==(const TrainerState&) const = default;
};

TrainerState initial_state(const TrainConfig& config);

// Root of all per-step streams.
Rng step_stream(std::uint64_t seed, std::uint64_t step);

struct ObjectiveModes {
  ForwardMode generator = ForwardMode::train();
  ForwardMode discriminator = ForwardMode::train();
};

struct GeneratorObjective {
  LossBreakdown breakdown;
  std::vector<Matrix> grad_g;
  std::vector<Matrix> grad_f;
  CycleOutputs cycle;
  ConditionalCycleLoss conditional;
};

// Value and generator gradients of the combined objective on one batch.
// Deterministic in (model, batch, config, stream, modes).
GeneratorObjective generator_objective(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                                       const TrainConfig& config, const Rng& stream,
                                       ObjectiveModes modes = {});

struct StepRecord {
  std::uint64_t step = 0;
  LossBreakdown losses;
  double disc_ccyc = 0.0;  // conditional discriminators' own loss, last update

  bool operator==(const StepRecord&) const = default;
};

StepRecord train_step(TrainerState& state, const Matrix& x, const Matrix& y,
                      const TrainConfig& config);

struct EvalSnapshot {
  std::uint64_t step = 0;
  std::map<std::string, double> metrics;

  bool operator==(const EvalSnapshot&) const = default;
};

struct TrainLog {
  std::vector<StepRecord> steps;
  std::vector<EvalSnapshot> evals;

  // JSON Lines: {"type":"step",...} and {"type":"eval",...} records.
  void write_jsonl(std::ostream& out) const;
};

std::string step_record_json(const StepRecord& record);
std::string eval_snapshot_json(const EvalSnapshot& snapshot);

using EvalFn = std::function<std::map<std::string, double>(const RetroGanModel&, std::uint64_t step)>;

struct TrainOptions {
  EvalFn evaluate;
  // Metric maximised for best-model selection; empty picks the first key.
  std::string selection_metric;
  // Continue from this state instead of a fresh model.
  std::optional<TrainerState> resume_from;
  std::function<void(const StepRecord&)> on_step;
  std::function<void(const EvalSnapshot&)> on_eval;
};

struct TrainResult {
  TrainerState final_state;
  RetroGanModel best_model;
  std::uint64_t best_step = 0;
  std::optional<double> best_metric;
  TrainLog log;
};

// Shuffles the corpus every epoch and runs until config.total_batches steps
// have completed. Evaluates every eval_every steps and after the last step.
TrainResult train(const PairedCorpus& corpus, const TrainConfig& config,
                  const TrainOptions& options = {});

// Row indices of the batch used at `step` (0-based).
std::vector<std::size_t> batch_rows(std::size_t corpus_size, const TrainConfig& config,
                                    std::uint64_t step);

}  // namespace retrogan

#endif  // RETROGAN_TRAINER_HPP
