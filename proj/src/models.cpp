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

#include "retrogan/models.hpp"

namespace retrogan {

namespace {

enum StreamTag : std::uint64_t {
  kInitG = 1,
  kInitF,
  kInitDX,
  kInitDY,
  kInitDCX,
  kInitDCY,
};

}  // namespace

void ArchitectureConfig::validate() const {
  if (dim == 0) fail(ErrorCode::kConfig, "architecture: dim must be >= 1");
  if (generator_size == 0 || discriminator_size == 0) {
    fail(ErrorCode::kConfig, "architecture: hidden sizes must be >= 1");
  }
  if (generator_hidden_layers < 1 || generator_hidden_layers > kMaxHiddenLayers ||
      discriminator_hidden_layers < 1 || discriminator_hidden_layers > kMaxHiddenLayers) {
    fail(ErrorCode::kConfig, "architecture: hidden layer counts must lie in [1, " +
                                 std::to_string(kMaxHiddenLayers) + "]");
  }
  if (!(generator_dropout >= 0.0 && generator_dropout < 1.0) ||
      !(discriminator_dropout >= 0.0 && discriminator_dropout < 1.0)) {
    fail(ErrorCode::kConfig, "architecture: dropout rates must lie in [0, 1)");
  }
  if (!(batchnorm.epsilon > 0.0) || !(batchnorm.momentum >= 0.0 && batchnorm.momentum < 1.0)) {
    fail(ErrorCode::kConfig, "architecture: batch-norm epsilon must be > 0, momentum in [0, 1)");
  }
}

std::vector<LayerSpec> generator_layers(const ArchitectureConfig& arch) {
  std::vector<LayerSpec> layers;
  std::size_t width = arch.dim;
  for (std::size_t i = 0; i < arch.generator_hidden_layers; ++i) {
    layers.push_back(LayerSpec::dense(width, arch.generator_size));
    layers.push_back(LayerSpec::relu(arch.generator_size));
    layers.push_back(LayerSpec::dropout(arch.generator_size, arch.generator_dropout));
    width = arch.generator_size;
  }
  layers.push_back(LayerSpec::dense(width, arch.dim));
  return layers;
}

std::vector<LayerSpec> discriminator_layers(const ArchitectureConfig& arch, std::size_t input_dim) {
  std::vector<LayerSpec> layers;
  std::size_t width = input_dim;
  const std::size_t h = arch.discriminator_size;
  for (std::size_t i = 0; i < arch.discriminator_hidden_layers; ++i) {
    layers.push_back(LayerSpec::dense(width, h));
    layers.push_back(LayerSpec::relu(h));
    if (i + 1 == arch.discriminator_hidden_layers) layers.push_back(LayerSpec::batchnorm(h));
    layers.push_back(LayerSpec::dropout(h, arch.discriminator_dropout));
    width = h;
  }
  layers.push_back(LayerSpec::dense(width, 1));
  layers.push_back(LayerSpec::sigmoid(1));
  return layers;
}

std::size_t RetroGanModel::parameter_count() const {
  std::size_t total = 0;
  for (const Network* n : networks()) total += n->parameter_count();
  return total;
}

std::vector<Network*> RetroGanModel::networks() { return {&g, &f, &d_x, &d_y, &d_cx, &d_cy}; }

std::vector<const Network*> RetroGanModel::networks() const {
  return {&g, &f, &d_x, &d_y, &d_cx, &d_cy};
}

RetroGanModel build_model(const ArchitectureConfig& arch, const Rng& rng) {
  arch.validate();
  RetroGanModel model;
  model.arch = arch;
  const auto gen = generator_layers(arch);
  const auto disc = discriminator_layers(arch, arch.dim);
  const auto cond = discriminator_layers(arch, 2 * arch.dim);
  model.g = Network(gen, arch.batchnorm);
  model.f = Network(gen, arch.batchnorm);
  model.d_x = Network(disc, arch.batchnorm);
  model.d_y = Network(disc, arch.batchnorm);
  model.d_cx = Network(cond, arch.batchnorm);
  model.d_cy = Network(cond, arch.batchnorm);

  const std::uint64_t tags[] = {kInitG, kInitF, kInitDX, kInitDY, kInitDCX, kInitDCY};
  auto nets = model.networks();
  for (std::size_t i = 0; i < nets.size(); ++i) {
    Rng stream = rng.derive(tags[i]);
    nets[i]->initialize(stream);
  }
  return model;
}

std::size_t predicted_parameter_count(const ArchitectureConfig& arch) {
  arch.validate();
  const auto gen = generator_layers(arch);
  const auto disc = discriminator_layers(arch, arch.dim);
  const auto cond = discriminator_layers(arch, 2 * arch.dim);
  return 2 * (parameter_count(gen) + parameter_count(disc) + parameter_count(cond));
}

CycleStreams CycleStreams::from(const Rng& base) {
  return {base.derive(1), base.derive(2), base.derive(3), base.derive(4)};
}

CycleOutputs cycle_forward(const RetroGanModel& model, const Matrix& x, const Matrix& y,
                           ForwardMode mode, CycleStreams& streams) {
  if (x.cols() != model.dim() || y.cols() != model.dim()) {
    fail(ErrorCode::kShape, "cycle_forward: batches must have width " + std::to_string(model.dim()));
  }
  CycleOutputs out;
  out.g_x = forward(model.g, x, mode, &streams.g_x);
  out.f_y = forward(model.f, y, mode, &streams.f_y);
  out.f_g_x = forward(model.f, out.g_x.output, mode, &streams.f_g_x);
  out.g_f_y = forward(model.g, out.f_y.output, mode, &streams.g_f_y);
  return out;
}

ForwardTrace conditional_score(const Network& disc, const Matrix& condition, const Matrix& sample,
                               ForwardMode mode, Rng* rng) {
  if (condition.rows() != sample.rows() || condition.cols() != sample.cols()) {
    fail(ErrorCode::kShape, "conditional_score: condition " + condition.shape_string() +
                                " and sample " + sample.shape_string() + " differ");
  }
  return forward(disc, hconcat(condition, sample), mode, rng);
}

}  // namespace retrogan
