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

#ifndef RETROGAN_OPTIM_HPP
#define RETROGAN_OPTIM_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "retrogan/tensor.hpp"

namespace retrogan {

struct AdamSettings {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  bool operator==(const AdamSettings&) const = default;
};

struct AdamState {
  AdamSettings settings;
  std::uint64_t step = 0;
  std::vector<Matrix> m;
  std::vector<Matrix> v;

  // Zero moments shaped like `params`.
  static AdamState for_params(std::span<const Matrix* const> params, AdamSettings settings);

  bool operator==(const AdamState&) const = default;
};

// Bias-corrected Adam:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
//   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
void adam_step(std::span<Matrix* const> params, std::span<const Matrix> grads, AdamState& state);

// p <- p - lr * g
void sgd_step(std::span<Matrix* const> params, std::span<const Matrix> grads, double lr);

}  // namespace retrogan

#endif  // RETROGAN_OPTIM_HPP
