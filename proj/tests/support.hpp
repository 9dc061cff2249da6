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

// Helpers shared by the unit tests and the acceptance runner.

#ifndef RETROGAN_TESTS_SUPPORT_HPP
#define RETROGAN_TESTS_SUPPORT_HPP

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "retrogan/losses.hpp"
#include "retrogan/trainer.hpp"

namespace retrogan::testing {

inline Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double scale = 1.0) {
  return draw_gaussian(rng, rows, cols, 0.0, scale);
}

inline Matrix random_unit_rows(Rng& rng, std::size_t rows, std::size_t cols) {
  return row_l2_normalize(random_matrix(rng, rows, cols));
}

// Toy configuration: d = 8, hidden width 16.
inline TrainConfig toy_config(std::size_t gen_layers = 2, std::size_t disc_layers = 2,
                              std::size_t hidden = 16, std::size_t dim = 8) {
  TrainConfig c;
  c.architecture.dim = dim;
  c.architecture.generator_size = hidden;
  c.architecture.discriminator_size = hidden;
  c.architecture.generator_hidden_layers = gen_layers;
  c.architecture.discriminator_hidden_layers = disc_layers;
  c.batch_size = 8;
  c.total_batches = 10;
  c.g_lr = 1e-3;
  c.d_lr = 1e-3;
  return c;
}

// Random biases keep pre-activations off the ReLU kink at exactly zero, and
// running statistics away from (0, 1) keep frozen batch norm from being a
// plain identity.
inline void perturb_network(Network& net, Rng& rng) {
  for (LayerParams& p : net.params()) {
    for (double& v : p.bias.values()) v = 0.1 * rng.gaussian();
    for (double& v : p.running_mean.values()) v = 0.1 * rng.gaussian();
    for (double& v : p.running_var.values()) v = 0.5 + rng.uniform();
    for (double& v : p.gamma.values()) v = 1.0 + 0.2 * rng.gaussian();
    for (double& v : p.beta.values()) v = 0.1 * rng.gaussian();
  }
}

inline void perturb_model(RetroGanModel& model, Rng& rng) {
  for (Network* net : model.networks()) perturb_network(*net, rng);
}

// gradcheck() on `samples` random parameter entries instead of all of them,
// for networks too wide to probe exhaustively.
inline double sampled_gradcheck(Network& net, const Matrix& batch, std::size_t samples,
                                std::uint64_t seed, double epsilon = 1e-5) {
  Rng rng(seed);
  const Matrix projection = random_matrix(rng, batch.rows(), net.output_dim());
  const ForwardTrace trace = forward(net, batch, ForwardMode::frozen(), nullptr);
  const BackwardResult analytic = backward(net, trace, projection);
  const std::vector<Matrix*> params = net.trainable();
  double worst = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t t = rng.uniform_index(params.size());
    const std::size_t k = rng.uniform_index(params[t]->size());
    double& value = params[t]->values()[k];
    const double saved = value;
    auto objective = [&] {
      return dot(forward(net, batch, ForwardMode::frozen(), nullptr).output.values(), projection.values());
    };
    value = saved + epsilon;
    const double plus = objective();
    value = saved - epsilon;
    const double minus = objective();
    value = saved;
    const Matrix a(1, 1, analytic.param_grads[t].values()[k]);
    const Matrix n(1, 1, (plus - minus) / (2.0 * epsilon));
    worst = std::max(worst, max_relative_error(std::span<const Matrix>(&a, 1), std::span<const Matrix>(&n, 1)));
  }
  return worst;
}

inline ObjectiveModes frozen_modes() { return {ForwardMode::frozen(), ForwardMode::frozen()}; }

// Relative error between generator_objective's analytic G and F gradients
// and central differences of its total, with dropout off and batch norm
// frozen.
inline double objective_gradcheck(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                                  const TrainConfig& config, const Rng& stream,
                                  double epsilon = 1e-5) {
  RetroGanModel probe = model;
  const GeneratorObjective analytic = generator_objective(probe, x, y, config, stream, frozen_modes());
  std::vector<Matrix*> params;
  for (Matrix* p : probe.g.trainable()) params.push_back(p);
  for (Matrix* p : probe.f.trainable()) params.push_back(p);
  const auto numeric = numeric_gradients(params, [&] {
    return generator_objective(probe, x, y, config, stream, frozen_modes()).breakdown.total;
  }, epsilon);
  std::vector<Matrix> analytic_all = analytic.grad_g;
  analytic_all.insert(analytic_all.end(), analytic.grad_f.begin(), analytic.grad_f.end());
  return max_relative_error(analytic_all, numeric);
}

// Config whose objective is exactly one named term. Names: gan, cycle,
// identity, one_way_mm, cycle_mm, conditional.
inline TrainConfig only_term(TrainConfig c, const std::string& term) {
  c.toggles = Toggles::all_off();
  if (term == "gan") c.toggles.gan_loss = true;
  if (term == "cycle") c.toggles.cycle_loss = true;
  if (term == "identity") c.toggles.id_loss = true;
  if (term == "one_way_mm") c.toggles.one_way_mm = true;
  if (term == "cycle_mm") c.toggles.cycle_mm = true;
  if (term == "conditional") c.toggles.cycle_dis = true;
  return c;
}

// Relative error of margin_term's gradient w.r.t. the prediction.
inline double margin_gradcheck(const Matrix& pred, const Matrix& gold, const Confounders& conf,
                               double delta, double epsilon = 1e-5) {
  Matrix probe = pred;
  const MarginTerm analytic = margin_term(probe, gold, conf, delta);
  Matrix* params[] = {&probe};
  const auto numeric = numeric_gradients(
      params, [&] { return margin_term(probe, gold, conf, delta).value; }, epsilon);
  return max_relative_error(std::span<const Matrix>(&analytic.grad_pred, 1), numeric);
}

// Relative error of the conditional discriminators' own gradients.
inline double conditional_disc_gradcheck(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                                         double epsilon = 1e-5) {
  RetroGanModel probe = model;
  const auto mode = ForwardMode::frozen();
  const auto cycle_mode = ForwardMode::eval();
  CycleStreams cs = CycleStreams::from(Rng(1));
  const CycleOutputs cyc = cycle_forward(probe, x, y, cycle_mode, cs);
  auto loss = [&] {
    ConditionalStreams s = ConditionalStreams::from(Rng(2));
    return conditional_cycle_loss(probe, x, y, cyc.g_x.output, cyc.f_y.output, cyc.f_g_x.output,
                                  cyc.g_f_y.output, mode, s);
  };
  const ConditionalCycleLoss analytic = loss();
  std::vector<Matrix*> params;
  for (Matrix* p : probe.d_cx.trainable()) params.push_back(p);
  for (Matrix* p : probe.d_cy.trainable()) params.push_back(p);
  const auto numeric = numeric_gradients(params, [&] { return loss().disc_c_loss; }, epsilon);
  std::vector<Matrix> all = analytic.grad_d_cx;
  all.insert(all.end(), analytic.grad_d_cy.begin(), analytic.grad_d_cy.end());
  return max_relative_error(all, numeric);
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("retrogan_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace retrogan::testing

#endif  // RETROGAN_TESTS_SUPPORT_HPP
