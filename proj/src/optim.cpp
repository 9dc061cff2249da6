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

#include "retrogan/optim.hpp"

#include <cmath>

namespace retrogan {

namespace {

void check_lists(std::span<Matrix* const> params, std::span<const Matrix> grads) {
  if (params.size() != grads.size()) {
    fail(ErrorCode::kShape, "optimizer: " + std::to_string(params.size()) + " parameters but " +
                                std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != grads[i].rows() || params[i]->cols() != grads[i].cols()) {
      fail(ErrorCode::kShape, "optimizer: parameter " + std::to_string(i) + " is " +
                                  params[i]->shape_string() + ", gradient is " +
                                  grads[i].shape_string());
    }
  }
}

}  // namespace

AdamState AdamState::for_params(std::span<const Matrix* const> params, AdamSettings settings) {
  AdamState state;
  state.settings = settings;
  for (const Matrix* p : params) {
    state.m.emplace_back(p->rows(), p->cols());
    state.v.emplace_back(p->rows(), p->cols());
  }
  return state;
}

void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state) {
  check_lists(params, grads);
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    fail(ErrorCode::kShape, "adam: optimizer state does not match parameter list");
  }
  const AdamSettings& s = state.settings;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(s.beta1, t);
  const double correction2 = 1.0 - std::pow(s.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    auto g = grads[i].values();
    auto m = state.m[i].values();
    auto v = state.v[i].values();
    if (m.size() != p.size() || v.size() != p.size()) {
      fail(ErrorCode::kShape, "adam: moment shape mismatch at parameter " + std::to_string(i));
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
      m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g[k];
      v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g[k] * g[k];
      const double m_hat = m[k] / correction1;
      const double v_hat = v[k] / correction2;
      p[k] -= s.learning_rate * m_hat / (std::sqrt(v_hat) + s.epsilon);
    }
  }
}

void sgd_step(std::span<Matrix* const> params, std::span<const Matrix> grads, double lr) {
  check_lists(params, grads);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    auto g = grads[i].values();
    for (std::size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
  }
}

}  // namespace retrogan
