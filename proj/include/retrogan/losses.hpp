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

// Terms of the RetroGAN objective
//
//   L = L_gan(G, D_Y) + L_gan(F, D_X) + lambda * L_cyc + gamma * L_id
//       + L_mm + sigma * L_ccyc
//
// Every term is a mean over batch rows and returns the gradient with respect
// to the generator outputs it depends on, so the trainer can chain them back
// through the networks.

#ifndef RETROGAN_LOSSES_HPP
#define RETROGAN_LOSSES_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "retrogan/models.hpp"

namespace retrogan {

struct LossWeights {
  double lambda_cyc = 1.0;
  double gamma_id = 0.01;
  double sigma_ccyc = 1.0;
  double delta_mm = 1.0;
  // 0 selects min(10, batch_size - 1).
  std::size_t k_confounders = 0;

  void validate(std::size_t batch_size) const;
  std::size_t confounders_for(std::size_t batch_size) const;

  bool operator==(const LossWeights&) const = default;
};

// Switchable losses. Off means the term contributes exactly zero. The first
// five are the ablation toggles; gan_loss covers both plain adversarial terms.
struct Toggles {
  bool one_way_mm = true;
  bool cycle_mm = true;
  bool cycle_dis = true;
  bool id_loss = true;
  bool cycle_loss = true;
  bool gan_loss = true;

  static Toggles all_off() { return {false, false, false, false, false, false}; }
  bool operator==(const Toggles&) const = default;
};

inline constexpr const char* kToggleNames[] = {"one_way_mm", "cycle_mm", "cycle_dis", "id_loss",
                                               "cycle_loss"};
bool& toggle_by_name(Toggles& toggles, const std::string& name);

struct LossBreakdown {
  double gan_x = 0.0;  // generator side of L_gan(F, D_X)
  double gan_y = 0.0;  // generator side of L_gan(G, D_Y)
  double cyc = 0.0;
  double id = 0.0;
  double mm_forward = 0.0;   // G(x_i) against y
  double mm_backward = 0.0;  // F(y_i) against x
  double mm_cycle_y = 0.0;   // G(F(y_i)) against y
  double mm_cycle_x = 0.0;   // F(G(x_i)) against x
  double ccyc = 0.0;         // generator side of the conditional cycle loss
  double total = 0.0;

  bool operator==(const LossBreakdown&) const = default;
};

enum class AdversarialMode {
  kNonSaturating,  // generator minimises -log D(fake)
  kMinimax,        // generator minimises log(1 - D(fake))
};

inline constexpr double kScoreClamp = 1e-7;

struct AdversarialLoss {
  double disc_loss = 0.0;  // mean(-log D(real)) + mean(-log(1 - D(fake)))
  double gen_loss = 0.0;
  Matrix d_disc_d_real;
  Matrix d_disc_d_fake;
  Matrix d_gen_d_fake;
};

// Scores must lie in [0, 1]; they are clamped to [1e-7, 1 - 1e-7] before
// taking logs (clamped entries get zero gradient).
AdversarialLoss adversarial_loss(const Matrix& real_scores, const Matrix& fake_scores,
                                 AdversarialMode mode = AdversarialMode::kNonSaturating);

struct GeneratorAdversarialLoss {
  double value = 0.0;
  Matrix grad_fake;
};

// Generator side only, for discriminators that are not being trained here.
GeneratorAdversarialLoss generator_adversarial_loss(
    const Matrix& fake_scores, AdversarialMode mode = AdversarialMode::kNonSaturating);

struct ReconstructionLoss {
  double value = 0.0;
  Matrix grad_first;   // d value / d first reconstruction
  Matrix grad_second;  // d value / d second reconstruction
};

// Mean absolute error, averaged over all entries.
double mean_absolute_error(const Matrix& a, const Matrix& b);

// MAE(F(G(x)), x) + MAE(G(F(y)), y); grads w.r.t. F(G(x)) then G(F(y)).
ReconstructionLoss cycle_loss(const Matrix& x, const Matrix& f_g_x, const Matrix& y,
                              const Matrix& g_f_y);

// MAE(G(y), y) + MAE(F(x), x); grads w.r.t. G(y) then F(x).
ReconstructionLoss identity_loss(const Matrix& g_y, const Matrix& y, const Matrix& f_x,
                                 const Matrix& x);

// k distinct confounder rows per sample, drawn uniformly without replacement
// from the other rows of the batch.
struct Confounders {
  std::size_t rows = 0;
  std::size_t k = 0;
  std::vector<std::size_t> index;  // rows * k, row-major

  std::size_t at(std::size_t i, std::size_t j) const { return index[i * k + j]; }
};

Confounders sample_confounders(std::size_t rows, std::size_t k, Rng& rng);

struct MarginTerm {
  double value = 0.0;
  Matrix grad_pred;
};

// mean over (i, j) of max(0, delta - cos(pred_i, gold_i) + cos(pred_i, gold_c(i,j))).
// A zero prediction row counts as cosine 0 with zero gradient.
MarginTerm margin_term(const Matrix& pred, const Matrix& gold, const Confounders& confounders,
                       double delta);

struct MaxMarginLoss {
  MarginTerm forward;   // (G(x), y)
  MarginTerm backward;  // (F(y), x)
  MarginTerm cycle_y;   // (G(F(y)), y)
  MarginTerm cycle_x;   // (F(G(x)), x)

  double total() const { return forward.value + backward.value + cycle_y.value + cycle_x.value; }
};

MaxMarginLoss max_margin_loss(const Matrix& g_x, const Matrix& f_y, const Matrix& g_f_y,
                              const Matrix& f_g_x, const Matrix& x, const Matrix& y, double delta,
                              const Confounders& confounders);

// Draws the confounders from `rng`. Fails with kInsufficientConfounders for
// batches smaller than two rows.
MaxMarginLoss max_margin_loss(const Matrix& g_x, const Matrix& f_y, const Matrix& g_f_y,
                              const Matrix& f_g_x, const Matrix& x, const Matrix& y,
                              const LossWeights& weights, Rng& rng);

struct ConditionalStreams {
  Rng real_x;
  Rng fake_x;
  Rng real_y;
  Rng fake_y;

  static ConditionalStreams from(const Rng& base);
};

// D_cX judges (G(x), x) as real and (G(x), F(G(x))) as fake; D_cY judges
// (F(y), y) as real and (F(y), G(F(y))) as fake.
struct ConditionalCycleLoss {
  double disc_c_loss = 0.0;
  double gen_c_loss = 0.0;
  // Generator side, through the fake pairs only.
  Matrix grad_g_x;
  Matrix grad_f_g_x;
  Matrix grad_f_y;
  Matrix grad_g_f_y;
  // Discriminator side; inputs treated as constants.
  std::vector<Matrix> grad_d_cx;
  std::vector<Matrix> grad_d_cy;
  // Traces of the four discriminator passes (real_x, fake_x, real_y, fake_y).
  ForwardTrace real_x;
  ForwardTrace fake_x;
  ForwardTrace real_y;
  ForwardTrace fake_y;
};

ConditionalCycleLoss conditional_cycle_loss(const RetroGanModel& model, const Matrix& x,
                                            const Matrix& y, const Matrix& g_x, const Matrix& f_y,
                                            const Matrix& f_g_x, const Matrix& g_f_y,
                                            ForwardMode mode, ConditionalStreams& streams,
                                            AdversarialMode adversarial = AdversarialMode::kNonSaturating);

// Fills `total` from raw term values. Toggled-off terms are zeroed in the
// returned breakdown.
LossBreakdown combined_objective(const LossBreakdown& parts, const LossWeights& weights,
                                 const Toggles& toggles);

}  // namespace retrogan

#endif  // RETROGAN_LOSSES_HPP
