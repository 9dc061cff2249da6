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

#include "retrogan/trainer.hpp"

#include <cmath>
#include <json.hpp>
#include <numeric>
#include <ostream>

namespace retrogan {

namespace {

// Call sites inside one step. Values are part of the reproducibility
// contract: changing them changes every trajectory.
enum Site : std::uint64_t {
  kSiteCycle = 1,
  kSiteIdentityG = 2,
  kSiteIdentityF = 3,
  kSitePlainDX = 4,
  kSitePlainDY = 5,
  kSiteConditional = 6,
  kSiteConfounders = 7,
  kSiteConditionalRepeat = 8,
  kSitePlainTrain = 9,
};

constexpr std::uint64_t kStepStreamId = 0x53544550;     // "STEP"
constexpr std::uint64_t kShuffleStreamId = 0x53485546;  // "SHUF"
constexpr std::uint64_t kInitStreamId = 0x494E4954;     // "INIT"

void add_scaled(std::optional<Matrix>& slot, const Matrix& grad, double scale) {
  if (!slot) slot = Matrix(grad.rows(), grad.cols());
  axpy_in_place(*slot, scale, grad);
}

void backprop_into(const Network& net, const ForwardTrace& trace, const std::optional<Matrix>& upstream,
                   std::vector<Matrix>& param_grads, std::optional<Matrix>* input_slot) {
  if (!upstream) return;
  BackwardResult r = backward(net, trace, *upstream);
  accumulate(param_grads, r.param_grads);
  if (input_slot != nullptr) add_scaled(*input_slot, r.input_grad, 1.0);
}

void adam_on(Network& net, const std::vector<Matrix>& grads, AdamState& opt) {
  std::vector<Matrix*> params = net.trainable();
  adam_step(params, grads, opt);
}

void apply_conditional_update(TrainerState& state, const ConditionalCycleLoss& loss) {
  adam_on(state.model.d_cx, loss.grad_d_cx, state.opt_d_cx);
  adam_on(state.model.d_cy, loss.grad_d_cy, state.opt_d_cy);
  commit_batch_statistics(state.model.d_cx, loss.real_x);
  commit_batch_statistics(state.model.d_cx, loss.fake_x);
  commit_batch_statistics(state.model.d_cy, loss.real_y);
  commit_batch_statistics(state.model.d_cy, loss.fake_y);
}

double train_plain_discriminator(Network& disc, AdamState& opt, const Matrix& real, const Matrix& fake,
                                 AdversarialMode mode, Rng stream) {
  Rng real_stream = stream.derive(1);
  Rng fake_stream = stream.derive(2);
  const ForwardTrace real_trace = forward(disc, real, ForwardMode::train(), &real_stream);
  const ForwardTrace fake_trace = forward(disc, fake, ForwardMode::train(), &fake_stream);
  const AdversarialLoss adv = adversarial_loss(real_trace.output, fake_trace.output, mode);
  BackwardResult r = backward(disc, real_trace, adv.d_disc_d_real);
  accumulate(r.param_grads, backward(disc, fake_trace, adv.d_disc_d_fake).param_grads);
  adam_on(disc, r.param_grads, opt);
  commit_batch_statistics(disc, real_trace);
  commit_batch_statistics(disc, fake_trace);
  return adv.disc_loss;
}

std::vector<std::size_t> epoch_permutation(std::size_t n, std::uint64_t seed, std::uint64_t epoch) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng = Rng(seed, kShuffleStreamId).derive(epoch);
  rng.shuffle(std::span<std::size_t>(perm));
  return perm;
}

nlohmann::json breakdown_json(const LossBreakdown& b) {
  return {{"gan_x", b.gan_x},           {"gan_y", b.gan_y},
          {"cyc", b.cyc},               {"id", b.id},
          {"mm_forward", b.mm_forward}, {"mm_backward", b.mm_backward},
          {"mm_cycle_y", b.mm_cycle_y}, {"mm_cycle_x", b.mm_cycle_x},
          {"ccyc", b.ccyc},             {"total", b.total}};
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size < 2) fail(ErrorCode::kConfig, "batch_size must be >= 2");
  if (!(g_lr > 0.0) || !std::isfinite(g_lr) || !(d_lr > 0.0) || !std::isfinite(d_lr)) {
    fail(ErrorCode::kConfig, "learning rates must be positive");
  }
  if (dis_train_amount < 1) fail(ErrorCode::kConfig, "dis_train_amount must be >= 1");
  architecture.validate();
  weights.validate(batch_size);
}

TrainConfig TrainConfig::paper_default() { return TrainConfig{}; }

TrainConfig TrainConfig::tuned() {
  TrainConfig c;
  c.g_lr = 0.00495;
  c.d_lr = 0.00885;
  c.batch_size = 32;
  c.dis_train_amount = 1;
  c.architecture.generator_size = 2048;
  c.architecture.discriminator_size = 2048;
  c.architecture.generator_hidden_layers = 1;
  c.architecture.discriminator_hidden_layers = 3;
  return c;
}

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.g_lr = 2e-3;
  c.d_lr = 2e-3;
  c.total_batches = 3000;
  c.eval_every = 500;
  c.architecture.dim = 32;
  c.architecture.generator_size = 64;
  c.architecture.discriminator_size = 64;
  return c;
}

TrainConfig TrainConfig::preset(const std::string& name) {
  if (name == "paper-default") return paper_default();
  if (name == "tuned") return tuned();
  if (name == "desk") return desk();
  fail(ErrorCode::kConfig, "unknown preset '" + name + "' (expected paper-default, tuned or desk)");
}

std::vector<AdamState*> TrainerState::optimizers() {
  return {&opt_g, &opt_f, &opt_d_x, &opt_d_y, &opt_d_cx, &opt_d_cy};
}

std::vector<const AdamState*> TrainerState::optimizers() const {
  return {&opt_g, &opt_f, &opt_d_x, &opt_d_y, &opt_d_cx, &opt_d_cy};
}

TrainerState initial_state(const TrainConfig& config) {
  config.validate();
  TrainerState state;
  state.seed = config.seed;
  state.model = build_model(config.architecture, Rng(config.seed, kInitStreamId));
  const AdamSettings gen{config.g_lr};
  const AdamSettings disc{config.d_lr};
  auto nets = state.model.networks();
  auto opts = state.optimizers();
  for (std::size_t i = 0; i < nets.size(); ++i) {
    const auto params = std::as_const(*nets[i]).trainable();
    *opts[i] = AdamState::for_params(params, i < 2 ? gen : disc);
  }
  return state;
}

Rng step_stream(std::uint64_t seed, std::uint64_t step) {
  return Rng(seed, kStepStreamId).derive(step);
}

GeneratorObjective generator_objective(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                                       const TrainConfig& config, const Rng& stream,
                                       ObjectiveModes modes) {
  if (x.rows() != y.rows() || x.cols() != model.dim() || y.cols() != model.dim()) {
    fail(ErrorCode::kShape, "generator_objective: x " + x.shape_string() + " and y " +
                                y.shape_string() + " must be row-aligned with width " +
                                std::to_string(model.dim()));
  }
  if (x.rows() < 2) {
    fail(ErrorCode::kInsufficientConfounders, "a training batch needs at least 2 paired rows");
  }
  const Toggles& on = config.toggles;
  const LossWeights& w = config.weights;

  GeneratorObjective out;
  CycleStreams cycle_streams = CycleStreams::from(stream.derive(kSiteCycle));
  out.cycle = cycle_forward(model, x, y, modes.generator, cycle_streams);
  const Matrix& g_x = out.cycle.g_x.output;
  const Matrix& f_y = out.cycle.f_y.output;
  const Matrix& f_g_x = out.cycle.f_g_x.output;
  const Matrix& g_f_y = out.cycle.g_f_y.output;

  LossBreakdown parts;
  // Upstream gradients on each generator output.
  std::optional<Matrix> up_g_x, up_f_y, up_f_g_x, up_g_f_y, up_g_y, up_f_x;

  if (on.gan_loss) {
    Rng dy_stream = stream.derive(kSitePlainDY);
    Rng dx_stream = stream.derive(kSitePlainDX);
    const ForwardTrace dy = forward(model.d_y, g_x, modes.discriminator, &dy_stream);
    const ForwardTrace dx = forward(model.d_x, f_y, modes.discriminator, &dx_stream);
    const GeneratorAdversarialLoss adv_y = generator_adversarial_loss(dy.output, config.adversarial);
    const GeneratorAdversarialLoss adv_x = generator_adversarial_loss(dx.output, config.adversarial);
    parts.gan_y = adv_y.value;
    parts.gan_x = adv_x.value;
    if (modes.discriminator.record) {
      add_scaled(up_g_x, backward(model.d_y, dy, adv_y.grad_fake).input_grad, 1.0);
      add_scaled(up_f_y, backward(model.d_x, dx, adv_x.grad_fake).input_grad, 1.0);
    }
  }

  if (on.cycle_loss) {
    const ReconstructionLoss cyc = cycle_loss(x, f_g_x, y, g_f_y);
    parts.cyc = cyc.value;
    if (w.lambda_cyc > 0.0) {
      add_scaled(up_f_g_x, cyc.grad_first, w.lambda_cyc);
      add_scaled(up_g_f_y, cyc.grad_second, w.lambda_cyc);
    }
  }

  ForwardTrace g_y_trace;
  ForwardTrace f_x_trace;
  if (on.id_loss) {
    Rng g_stream = stream.derive(kSiteIdentityG);
    Rng f_stream = stream.derive(kSiteIdentityF);
    g_y_trace = forward(model.g, y, modes.generator, &g_stream);
    f_x_trace = forward(model.f, x, modes.generator, &f_stream);
    const ReconstructionLoss id = identity_loss(g_y_trace.output, y, f_x_trace.output, x);
    parts.id = id.value;
    if (w.gamma_id > 0.0) {
      add_scaled(up_g_y, id.grad_first, w.gamma_id);
      add_scaled(up_f_x, id.grad_second, w.gamma_id);
    }
  }

  if (on.one_way_mm || on.cycle_mm) {
    Rng conf_stream = stream.derive(kSiteConfounders);
    const Confounders conf = sample_confounders(x.rows(), w.confounders_for(x.rows()), conf_stream);
    if (on.one_way_mm) {
      const MarginTerm fwd = margin_term(g_x, y, conf, w.delta_mm);
      const MarginTerm bwd = margin_term(f_y, x, conf, w.delta_mm);
      parts.mm_forward = fwd.value;
      parts.mm_backward = bwd.value;
      add_scaled(up_g_x, fwd.grad_pred, 1.0);
      add_scaled(up_f_y, bwd.grad_pred, 1.0);
    }
    if (on.cycle_mm) {
      const MarginTerm cy = margin_term(g_f_y, y, conf, w.delta_mm);
      const MarginTerm cx = margin_term(f_g_x, x, conf, w.delta_mm);
      parts.mm_cycle_y = cy.value;
      parts.mm_cycle_x = cx.value;
      add_scaled(up_g_f_y, cy.grad_pred, 1.0);
      add_scaled(up_f_g_x, cx.grad_pred, 1.0);
    }
  }

  // Always evaluated: the conditional discriminators train on these passes
  // even when their term is switched off for the generators.
  ConditionalStreams cond_streams = ConditionalStreams::from(stream.derive(kSiteConditional));
  out.conditional = conditional_cycle_loss(model, x, y, g_x, f_y, f_g_x, g_f_y, modes.discriminator,
                                           cond_streams, config.adversarial);
  parts.ccyc = out.conditional.gen_c_loss;
  if (on.cycle_dis && w.sigma_ccyc > 0.0 && modes.discriminator.record) {
    add_scaled(up_g_x, out.conditional.grad_g_x, w.sigma_ccyc);
    add_scaled(up_f_g_x, out.conditional.grad_f_g_x, w.sigma_ccyc);
    add_scaled(up_f_y, out.conditional.grad_f_y, w.sigma_ccyc);
    add_scaled(up_g_f_y, out.conditional.grad_g_f_y, w.sigma_ccyc);
  }

  out.breakdown = combined_objective(parts, w, on);

  out.grad_g = zero_gradients(model.g);
  out.grad_f = zero_gradients(model.f);
  if (!modes.generator.record) return out;
  // Second generator of each cycle first, so its input gradient reaches the
  // first generator's upstream.
  backprop_into(model.f, out.cycle.f_g_x, up_f_g_x, out.grad_f, &up_g_x);
  backprop_into(model.g, out.cycle.g_f_y, up_g_f_y, out.grad_g, &up_f_y);
  backprop_into(model.g, out.cycle.g_x, up_g_x, out.grad_g, nullptr);
  backprop_into(model.f, out.cycle.f_y, up_f_y, out.grad_f, nullptr);
  backprop_into(model.g, g_y_trace, up_g_y, out.grad_g, nullptr);
  backprop_into(model.f, f_x_trace, up_f_x, out.grad_f, nullptr);
  return out;
}

StepRecord train_step(TrainerState& state, const Matrix& x, const Matrix& y,
                      const TrainConfig& config) {
  if (state.model.arch != config.architecture) {
    fail(ErrorCode::kConfigMismatch, "train_step: model architecture differs from config");
  }
  const Rng stream = step_stream(state.seed, state.step);
  GeneratorObjective obj = generator_objective(state.model, x, y, config, stream);

  if (config.generator_update == GeneratorUpdate::kJoint) {
    adam_on(state.model.g, obj.grad_g, state.opt_g);
    adam_on(state.model.f, obj.grad_f, state.opt_f);
  } else {
    adam_on(state.model.g, obj.grad_g, state.opt_g);
    const GeneratorObjective again = generator_objective(state.model, x, y, config, stream);
    adam_on(state.model.f, again.grad_f, state.opt_f);
  }

  // Conditional discriminators see the generator outputs from before the
  // update, as constants.
  const Matrix& g_x = obj.cycle.g_x.output;
  const Matrix& f_y = obj.cycle.f_y.output;
  const Matrix& f_g_x = obj.cycle.f_g_x.output;
  const Matrix& g_f_y = obj.cycle.g_f_y.output;
  double disc_c = obj.conditional.disc_c_loss;
  apply_conditional_update(state, obj.conditional);
  for (std::size_t it = 1; it < config.dis_train_amount; ++it) {
    ConditionalStreams cs = ConditionalStreams::from(stream.derive(kSiteConditionalRepeat).derive(it));
    const ConditionalCycleLoss again = conditional_cycle_loss(
        state.model, x, y, g_x, f_y, f_g_x, g_f_y, ForwardMode::train(), cs, config.adversarial);
    apply_conditional_update(state, again);
    disc_c = again.disc_c_loss;
  }

  if (config.train_plain_discriminators) {
    const Rng plain = stream.derive(kSitePlainTrain);
    for (std::size_t it = 0; it < config.dis_train_amount; ++it) {
      train_plain_discriminator(state.model.d_y, state.opt_d_y, y, g_x, config.adversarial,
                                plain.derive(2 * it));
      train_plain_discriminator(state.model.d_x, state.opt_d_x, x, f_y, config.adversarial,
                                plain.derive(2 * it + 1));
    }
  }

  state.step += 1;
  return {state.step, obj.breakdown, disc_c};
}

std::string step_record_json(const StepRecord& record) {
  nlohmann::json j = breakdown_json(record.losses);
  j["type"] = "step";
  j["step"] = record.step;
  j["disc_ccyc"] = record.disc_ccyc;
  return j.dump();
}

std::string eval_snapshot_json(const EvalSnapshot& snapshot) {
  nlohmann::json j;
  j["type"] = "eval";
  j["step"] = snapshot.step;
  j["metrics"] = snapshot.metrics;
  return j.dump();
}

void TrainLog::write_jsonl(std::ostream& out) const {
  std::size_t e = 0;
  for (const StepRecord& s : steps) {
    out << step_record_json(s) << '\n';
    while (e < evals.size() && evals[e].step <= s.step) out << eval_snapshot_json(evals[e++]) << '\n';
  }
  while (e < evals.size()) out << eval_snapshot_json(evals[e++]) << '\n';
}

std::vector<std::size_t> batch_rows(std::size_t corpus_size, const TrainConfig& config,
                                    std::uint64_t step) {
  if (corpus_size < 2) fail(ErrorCode::kData, "corpus needs at least 2 pairs");
  const std::size_t b = std::min(config.batch_size, corpus_size);
  const std::uint64_t per_epoch = corpus_size / b;
  const auto perm = epoch_permutation(corpus_size, config.seed, step / per_epoch);
  const std::size_t start = static_cast<std::size_t>(step % per_epoch) * b;
  return {perm.begin() + static_cast<std::ptrdiff_t>(start),
          perm.begin() + static_cast<std::ptrdiff_t>(start + b)};
}

TrainResult train(const PairedCorpus& corpus, const TrainConfig& config, const TrainOptions& options) {
  config.validate();
  if (corpus.size() == 0) fail(ErrorCode::kData, "training corpus is empty");
  if (corpus.size() < 2) fail(ErrorCode::kData, "training corpus needs at least 2 pairs");
  if (corpus.dim() != config.architecture.dim) {
    fail(ErrorCode::kDimension, "corpus dimension " + std::to_string(corpus.dim()) +
                                    " does not match architecture dim " +
                                    std::to_string(config.architecture.dim));
  }

  TrainResult result;
  result.final_state = options.resume_from ? *options.resume_from : initial_state(config);
  TrainerState& state = result.final_state;
  if (state.model.arch != config.architecture) {
    fail(ErrorCode::kConfigMismatch, "resume state architecture differs from config");
  }
  if (state.seed != config.seed) {
    fail(ErrorCode::kConfigMismatch, "resume state seed differs from config seed");
  }
  result.best_model = state.model;
  result.best_step = state.step;

  auto run_eval = [&]() {
    EvalSnapshot snap{state.step, options.evaluate(state.model, state.step)};
    if (!snap.metrics.empty()) {
      const std::string key =
          options.selection_metric.empty() ? snap.metrics.begin()->first : options.selection_metric;
      const auto it = snap.metrics.find(key);
      if (it == snap.metrics.end()) {
        fail(ErrorCode::kConfig, "selection metric '" + key + "' not produced by evaluation");
      }
      if (!result.best_metric || it->second > *result.best_metric) {
        result.best_metric = it->second;
        result.best_model = state.model;
        result.best_step = state.step;
      }
    }
    if (options.on_eval) options.on_eval(snap);
    result.log.evals.push_back(std::move(snap));
  };

  const std::size_t b = std::min(config.batch_size, corpus.size());
  const std::uint64_t per_epoch = corpus.size() / b;
  std::uint64_t cached_epoch = ~std::uint64_t{0};
  std::vector<std::size_t> perm;
  std::vector<std::size_t> rows(b);
  while (state.step < config.total_batches) {
    const std::uint64_t epoch = state.step / per_epoch;
    if (epoch != cached_epoch) {
      perm = epoch_permutation(corpus.size(), config.seed, epoch);
      cached_epoch = epoch;
    }
    const std::size_t start = static_cast<std::size_t>(state.step % per_epoch) * b;
    std::copy(perm.begin() + static_cast<std::ptrdiff_t>(start),
              perm.begin() + static_cast<std::ptrdiff_t>(start + b), rows.begin());
    const StepRecord rec =
        train_step(state, select_rows(corpus.x, rows), select_rows(corpus.y, rows), config);
    if (options.on_step) options.on_step(rec);
    result.log.steps.push_back(rec);
    if (options.evaluate && config.eval_every > 0 && state.step % config.eval_every == 0) run_eval();
  }
  if (options.evaluate && (result.log.evals.empty() || result.log.evals.back().step != state.step)) {
    run_eval();
  }
  if (!result.best_metric) {
    result.best_model = state.model;
    result.best_step = state.step;
  }
  return result;
}

}  // namespace retrogan
