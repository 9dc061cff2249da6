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

#include "retrogan/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace retrogan {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorCode::kShape, std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                                b.shape_string());
  }
}

void check_scores(const Matrix& scores, const char* what) {
  for (double s : scores.values()) {
    if (!(s >= 0.0 && s <= 1.0)) {
      fail(ErrorCode::kDomain, std::string(what) + ": score " + std::to_string(s) +
                                   " outside [0, 1]");
    }
  }
}

bool clamped(double s) { return s < kScoreClamp || s > 1.0 - kScoreClamp; }
double clamp_score(double s) { return std::clamp(s, kScoreClamp, 1.0 - kScoreClamp); }

// MAE(a, b) and its gradient with respect to a.
double mae_with_grad(const Matrix& a, const Matrix& b, Matrix& grad_a) {
  require_same_shape(a, b, "mean absolute error");
  grad_a = Matrix(a.rows(), a.cols());
  if (a.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(a.size());
  double sum = 0.0;
  auto av = a.values();
  auto bv = b.values();
  auto gv = grad_a.values();
  for (std::size_t k = 0; k < av.size(); ++k) {
    const double d = av[k] - bv[k];
    sum += std::abs(d);
    gv[k] = d > 0.0 ? scale : (d < 0.0 ? -scale : 0.0);
  }
  return sum * scale;
}

struct CosineWithGrad {
  double value;
  std::vector<double> grad;  // d cos / d pred
};

// A zero prediction (every hidden unit dead) scores 0 with zero gradient; a
// zero gold row is a data error.
CosineWithGrad cosine_with_grad(std::span<const double> pred, std::span<const double> gold) {
  const double np = l2_norm(pred);
  const double ng = l2_norm(gold);
  if (!(ng > 0.0)) fail(ErrorCode::kDegenerateVector, "max-margin target is a zero vector");
  if (!(np > 0.0)) return {0.0, std::vector<double>(pred.size(), 0.0)};
  const double c = dot(pred, gold) / (np * ng);
  CosineWithGrad out{c, std::vector<double>(pred.size())};
  for (std::size_t k = 0; k < pred.size(); ++k) {
    out.grad[k] = gold[k] / (np * ng) - c * pred[k] / (np * np);
  }
  return out;
}

}  // namespace

void LossWeights::validate(std::size_t batch_size) const {
  if (!(lambda_cyc >= 0.0) || !(gamma_id >= 0.0) || !(sigma_ccyc >= 0.0) || !(delta_mm >= 0.0)) {
    fail(ErrorCode::kConfig, "loss weights must be nonnegative");
  }
  if (batch_size < 2) {
    fail(ErrorCode::kInsufficientConfounders, "max-margin loss needs a batch of at least 2 rows");
  }
  if (k_confounders > batch_size - 1) {
    fail(ErrorCode::kConfig, "k_confounders " + std::to_string(k_confounders) +
                                 " exceeds batch_size - 1 = " + std::to_string(batch_size - 1));
  }
}

std::size_t LossWeights::confounders_for(std::size_t batch_size) const {
  if (batch_size < 2) {
    fail(ErrorCode::kInsufficientConfounders, "max-margin loss needs a batch of at least 2 rows");
  }
  if (k_confounders == 0) return std::min<std::size_t>(10, batch_size - 1);
  return std::min(k_confounders, batch_size - 1);
}

bool& toggle_by_name(Toggles& toggles, const std::string& name) {
  if (name == "one_way_mm") return toggles.one_way_mm;
  if (name == "cycle_mm") return toggles.cycle_mm;
  if (name == "cycle_dis") return toggles.cycle_dis;
  if (name == "id_loss") return toggles.id_loss;
  if (name == "cycle_loss") return toggles.cycle_loss;
  if (name == "gan_loss") return toggles.gan_loss;
  fail(ErrorCode::kConfig, "unknown loss toggle '" + name + "'");
}

AdversarialLoss adversarial_loss(const Matrix& real_scores, const Matrix& fake_scores,
                                 AdversarialMode mode) {
  check_scores(real_scores, "adversarial_loss(real)");
  check_scores(fake_scores, "adversarial_loss(fake)");
  if (real_scores.empty() || fake_scores.empty()) {
    fail(ErrorCode::kShape, "adversarial_loss: empty score batch");
  }
  AdversarialLoss out;
  out.d_disc_d_real = Matrix(real_scores.rows(), real_scores.cols());
  out.d_disc_d_fake = Matrix(fake_scores.rows(), fake_scores.cols());
  out.d_gen_d_fake = Matrix(fake_scores.rows(), fake_scores.cols());

  const double nr = static_cast<double>(real_scores.size());
  const double nf = static_cast<double>(fake_scores.size());
  double real_term = 0.0;
  for (std::size_t k = 0; k < real_scores.size(); ++k) {
    const double s = real_scores.values()[k];
    const double c = clamp_score(s);
    real_term -= std::log(c);
    out.d_disc_d_real.values()[k] = clamped(s) ? 0.0 : -1.0 / (nr * c);
  }
  double fake_term = 0.0;
  double gen = 0.0;
  for (std::size_t k = 0; k < fake_scores.size(); ++k) {
    const double s = fake_scores.values()[k];
    const double c = clamp_score(s);
    const bool flat = clamped(s);
    fake_term -= std::log1p(-c);
    out.d_disc_d_fake.values()[k] = flat ? 0.0 : 1.0 / (nf * (1.0 - c));
    if (mode == AdversarialMode::kNonSaturating) {
      gen -= std::log(c);
      out.d_gen_d_fake.values()[k] = flat ? 0.0 : -1.0 / (nf * c);
    } else {
      gen += std::log1p(-c);
      out.d_gen_d_fake.values()[k] = flat ? 0.0 : -1.0 / (nf * (1.0 - c));
    }
  }
  out.disc_loss = real_term / nr + fake_term / nf;
  out.gen_loss = gen / nf;
  return out;
}

GeneratorAdversarialLoss generator_adversarial_loss(const Matrix& fake_scores,
                                                    AdversarialMode mode) {
  AdversarialLoss full = adversarial_loss(fake_scores, fake_scores, mode);
  return {full.gen_loss, std::move(full.d_gen_d_fake)};
}

double mean_absolute_error(const Matrix& a, const Matrix& b) {
  Matrix unused;
  return mae_with_grad(a, b, unused);
}

ReconstructionLoss cycle_loss(const Matrix& x, const Matrix& f_g_x, const Matrix& y,
                              const Matrix& g_f_y) {
  ReconstructionLoss out;
  out.value = mae_with_grad(f_g_x, x, out.grad_first) + mae_with_grad(g_f_y, y, out.grad_second);
  return out;
}

ReconstructionLoss identity_loss(const Matrix& g_y, const Matrix& y, const Matrix& f_x,
                                 const Matrix& x) {
  ReconstructionLoss out;
  out.value = mae_with_grad(g_y, y, out.grad_first) + mae_with_grad(f_x, x, out.grad_second);
  return out;
}

Confounders sample_confounders(std::size_t rows, std::size_t k, Rng& rng) {
  if (rows < 2) {
    fail(ErrorCode::kInsufficientConfounders, "confounders need a batch of at least 2 rows");
  }
  if (k < 1 || k > rows - 1) {
    fail(ErrorCode::kInsufficientConfounders,
         "k_confounders must lie in [1, " + std::to_string(rows - 1) + "]");
  }
  Confounders out{rows, k, std::vector<std::size_t>(rows * k)};
  std::vector<std::size_t> others(rows - 1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0, o = 0; j < rows; ++j) {
      if (j != i) others[o++] = j;
    }
    // Partial Fisher-Yates: the first k slots are a uniform k-subset.
    for (std::size_t s = 0; s < k; ++s) {
      const std::size_t pick = s + static_cast<std::size_t>(rng.uniform_index(others.size() - s));
      std::swap(others[s], others[pick]);
      out.index[i * k + s] = others[s];
    }
  }
  return out;
}

MarginTerm margin_term(const Matrix& pred, const Matrix& gold, const Confounders& confounders,
                       double delta) {
  require_same_shape(pred, gold, "max-margin term");
  if (confounders.rows != pred.rows()) {
    fail(ErrorCode::kShape, "max-margin term: confounder table covers " +
                                std::to_string(confounders.rows) + " rows, batch has " +
                                std::to_string(pred.rows()));
  }
  MarginTerm out{0.0, Matrix(pred.rows(), pred.cols())};
  const std::size_t n = pred.rows();
  const std::size_t k = confounders.k;
  const double scale = 1.0 / static_cast<double>(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    const CosineWithGrad positive = cosine_with_grad(pred.row(i), gold.row(i));
    auto g = out.grad_pred.row(i);
    for (std::size_t j = 0; j < k; ++j) {
      const CosineWithGrad negative = cosine_with_grad(pred.row(i), gold.row(confounders.at(i, j)));
      const double z = delta - positive.value + negative.value;
      if (z > 0.0) {
        out.value += z * scale;
        for (std::size_t c = 0; c < g.size(); ++c) {
          g[c] += scale * (negative.grad[c] - positive.grad[c]);
        }
      }
    }
  }
  return out;
}

MaxMarginLoss max_margin_loss(const Matrix& g_x, const Matrix& f_y, const Matrix& g_f_y,
                              const Matrix& f_g_x, const Matrix& x, const Matrix& y, double delta,
                              const Confounders& confounders) {
  MaxMarginLoss out;
  out.forward = margin_term(g_x, y, confounders, delta);
  out.backward = margin_term(f_y, x, confounders, delta);
  out.cycle_y = margin_term(g_f_y, y, confounders, delta);
  out.cycle_x = margin_term(f_g_x, x, confounders, delta);
  return out;
}

MaxMarginLoss max_margin_loss(const Matrix& g_x, const Matrix& f_y, const Matrix& g_f_y,
                              const Matrix& f_g_x, const Matrix& x, const Matrix& y,
                              const LossWeights& weights, Rng& rng) {
  const std::size_t k = weights.confounders_for(x.rows());
  const Confounders confounders = sample_confounders(x.rows(), k, rng);
  return max_margin_loss(g_x, f_y, g_f_y, f_g_x, x, y, weights.delta_mm, confounders);
}

ConditionalStreams ConditionalStreams::from(const Rng& base) {
  return {base.derive(1), base.derive(2), base.derive(3), base.derive(4)};
}

ConditionalCycleLoss conditional_cycle_loss(const RetroGanModel& model, const Matrix& x,
                                            const Matrix& y, const Matrix& g_x, const Matrix& f_y,
                                            const Matrix& f_g_x, const Matrix& g_f_y,
                                            ForwardMode mode, ConditionalStreams& streams,
                                            AdversarialMode adversarial) {
  const std::size_t d = model.dim();
  for (const Matrix* m : {&x, &y, &g_x, &f_y, &f_g_x, &g_f_y}) {
    if (m->cols() != d || m->rows() != x.rows()) {
      fail(ErrorCode::kShape, "conditional_cycle_loss: batches must be row-aligned with width " +
                                  std::to_string(d));
    }
  }
  ConditionalCycleLoss out;
  out.real_x = conditional_score(model.d_cx, g_x, x, mode, &streams.real_x);
  out.fake_x = conditional_score(model.d_cx, g_x, f_g_x, mode, &streams.fake_x);
  out.real_y = conditional_score(model.d_cy, f_y, y, mode, &streams.real_y);
  out.fake_y = conditional_score(model.d_cy, f_y, g_f_y, mode, &streams.fake_y);

  const AdversarialLoss adv_x = adversarial_loss(out.real_x.output, out.fake_x.output, adversarial);
  const AdversarialLoss adv_y = adversarial_loss(out.real_y.output, out.fake_y.output, adversarial);
  out.disc_c_loss = adv_x.disc_loss + adv_y.disc_loss;
  out.gen_c_loss = adv_x.gen_loss + adv_y.gen_loss;

  if (!mode.record) return out;

  // Generator side: gradient of the fake-pair terms w.r.t. both halves of the
  // discriminator input.
  const BackwardResult gen_x = backward(model.d_cx, out.fake_x, adv_x.d_gen_d_fake);
  const BackwardResult gen_y = backward(model.d_cy, out.fake_y, adv_y.d_gen_d_fake);
  out.grad_g_x = column_block(gen_x.input_grad, 0, d);
  out.grad_f_g_x = column_block(gen_x.input_grad, d, d);
  out.grad_f_y = column_block(gen_y.input_grad, 0, d);
  out.grad_g_f_y = column_block(gen_y.input_grad, d, d);

  // Discriminator side.
  BackwardResult real_x = backward(model.d_cx, out.real_x, adv_x.d_disc_d_real);
  const BackwardResult fake_x = backward(model.d_cx, out.fake_x, adv_x.d_disc_d_fake);
  accumulate(real_x.param_grads, fake_x.param_grads);
  out.grad_d_cx = std::move(real_x.param_grads);
  BackwardResult real_y = backward(model.d_cy, out.real_y, adv_y.d_disc_d_real);
  const BackwardResult fake_y = backward(model.d_cy, out.fake_y, adv_y.d_disc_d_fake);
  accumulate(real_y.param_grads, fake_y.param_grads);
  out.grad_d_cy = std::move(real_y.param_grads);
  return out;
}

LossBreakdown combined_objective(const LossBreakdown& parts, const LossWeights& weights,
                                 const Toggles& toggles) {
  LossBreakdown out = parts;
  if (!toggles.cycle_loss) out.cyc = 0.0;
  if (!toggles.id_loss) out.id = 0.0;
  if (!toggles.one_way_mm) out.mm_forward = out.mm_backward = 0.0;
  if (!toggles.cycle_mm) out.mm_cycle_y = out.mm_cycle_x = 0.0;
  if (!toggles.cycle_dis) out.ccyc = 0.0;
  if (!toggles.gan_loss) out.gan_x = out.gan_y = 0.0;
  out.total = out.gan_x + out.gan_y + weights.lambda_cyc * out.cyc + weights.gamma_id * out.id +
              out.mm_forward + out.mm_backward + out.mm_cycle_y + out.mm_cycle_x +
              weights.sigma_ccyc * out.ccyc;
  return out;
}

}  // namespace retrogan
