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

// The six RetroGAN networks.
//
//   G   : X -> Y  generator
//   F   : Y -> X  generator
//   D_X, D_Y      plain discriminators (scalar sigmoid head)
//   D_cX, D_cY    conditional discriminators scoring [condition | sample]
//
// Generators: d -> [dense(h), relu, dropout(p_g)] x n_g -> dense(d).
// Discriminators: in -> [dense(h), relu, (batchnorm on the last hidden block),
// dropout(p_d)] x n_d -> dense(1) -> sigmoid.

#ifndef RETROGAN_MODELS_HPP
#define RETROGAN_MODELS_HPP

#include <cstddef>
#include <vector>

#include "retrogan/nn.hpp"

namespace retrogan {

struct ArchitectureConfig {
  std::size_t dim = 300;
  std::size_t generator_size = 2048;
  std::size_t generator_hidden_layers = 2;
  double generator_dropout = 0.2;
  std::size_t discriminator_size = 2048;
  std::size_t discriminator_hidden_layers = 2;
  double discriminator_dropout = 0.3;
  BatchNormSettings batchnorm;

  void validate() const;
  bool operator==(const ArchitectureConfig&) const = default;
};

inline constexpr std::size_t kMaxHiddenLayers = 8;

std::vector<LayerSpec> generator_layers(const ArchitectureConfig& arch);
std::vector<LayerSpec> discriminator_layers(const ArchitectureConfig& arch, std::size_t input_dim);

struct RetroGanModel {
  ArchitectureConfig arch;
  Network g;
  Network f;
  Network d_x;
  Network d_y;
  Network d_cx;
  Network d_cy;

  std::size_t dim() const noexcept { return arch.dim; }
  std::size_t parameter_count() const;

  // Fixed order used by checkpoints: G, F, D_X, D_Y, D_cX, D_cY.
  std::vector<Network*> networks();
  std::vector<const Network*> networks() const;

  bool operator==(const RetroGanModel&) const = default;
};

// Each network is initialised from its own stream derived from `rng`, so the
// weights do not depend on construction order.
RetroGanModel build_model(const ArchitectureConfig& arch, const Rng& rng);

// Sum of parameter_count over the six networks, computed from the layer
// specs alone.
std::size_t predicted_parameter_count(const ArchitectureConfig& arch);

struct CycleOutputs {
  ForwardTrace g_x;    // G(x)
  ForwardTrace f_y;    // F(y)
  ForwardTrace f_g_x;  // F(G(x))
  ForwardTrace g_f_y;  // G(F(y))
};

// Streams used for the four generator passes; each pass draws its dropout
// masks from its own stream.
struct CycleStreams {
  Rng g_x;
  Rng f_y;
  Rng f_g_x;
  Rng g_f_y;

  static CycleStreams from(const Rng& base);
};

CycleOutputs cycle_forward(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                           ForwardMode mode, CycleStreams& streams);

// Scores disc([condition | sample]); condition occupies the first d columns.
ForwardTrace conditional_score(const Network& disc, const Matrix& condition, const Matrix& sample,
                               ForwardMode mode, Rng* rng);

}  // namespace retrogan

#endif  // RETROGAN_MODELS_HPP
