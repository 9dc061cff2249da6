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

// Feed-forward layer stacks with hand-written backward passes.
//
// A Network owns its layer specs and parameters. forward() is a pure
// function of the network and the batch; it never mutates running
// batch-norm statistics. Callers that train batch-norm layers fold the batch
// statistics back in with commit_batch_statistics().

#ifndef RETROGAN_NN_HPP
#define RETROGAN_NN_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "retrogan/tensor.hpp"

namespace retrogan {

enum class LayerKind { kDense, kRelu, kDropout, kBatchNorm, kSigmoid };

const char* layer_kind_name(LayerKind kind) noexcept;

struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  double rate = 0.0;  // dropout only

  static LayerSpec dense(std::size_t in, std::size_t out) { return {LayerKind::kDense, in, out, 0.0}; }
  static LayerSpec relu(std::size_t dim) { return {LayerKind::kRelu, dim, dim, 0.0}; }
  static LayerSpec dropout(std::size_t dim, double rate) { return {LayerKind::kDropout, dim, dim, rate}; }
  static LayerSpec batchnorm(std::size_t dim) { return {LayerKind::kBatchNorm, dim, dim, 0.0}; }
  static LayerSpec sigmoid(std::size_t dim) { return {LayerKind::kSigmoid, dim, dim, 0.0}; }

  bool operator==(const LayerSpec&) const = default;
};

struct BatchNormSettings {
  double epsilon = 1e-5;
  double momentum = 0.99;

  bool operator==(const BatchNormSettings&) const = default;
};

// Parameters for one layer. Dense layers use weight [in x out] and bias
// [1 x out]; batch-norm layers use gamma/beta and the running statistics,
// all [1 x dim]. Unused members stay empty.
struct LayerParams {
  Matrix weight;
  Matrix bias;
  Matrix gamma;
  Matrix beta;
  Matrix running_mean;
  Matrix running_var;

  bool operator==(const LayerParams&) const = default;
};

class Network {
 public:
  Network() = default;
  explicit Network(std::vector<LayerSpec> layers, BatchNormSettings bn = {});

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  const BatchNormSettings& batchnorm_settings() const noexcept { return bn_; }
  std::size_t input_dim() const noexcept;
  std::size_t output_dim() const noexcept;

  std::vector<LayerParams>& params() noexcept { return params_; }
  const std::vector<LayerParams>& params() const noexcept { return params_; }

  // Weights ~ N(0, 2/in) for dense layers followed by ReLU, N(0, 1/in)
  // otherwise; biases zero; gamma one, beta zero, running stats (0, 1).
  void initialize(Rng& rng);

  // Trainable tensors in declared layer order: weight, bias per dense layer
  // and gamma, beta per batch-norm layer.
  std::vector<Matrix*> trainable();
  std::vector<const Matrix*> trainable() const;
  // Every stored tensor, trainable or not, in declared layer order.
  std::vector<Matrix*> state_tensors();
  std::vector<const Matrix*> state_tensors() const;

  std::size_t parameter_count() const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<LayerSpec> layers_;
  BatchNormSettings bn_;
  std::vector<LayerParams> params_;
};

// Trainable parameter count of a layer chain without building it.
std::size_t parameter_count(std::span<const LayerSpec> layers);

struct ForwardMode {
  bool record = true;       // keep what backward() needs
  bool dropout = true;      // apply inverted dropout masks
  bool batch_stats = true;  // normalise with batch statistics instead of running ones

  static constexpr ForwardMode train() { return {true, true, true}; }
  static constexpr ForwardMode eval() { return {false, false, false}; }
  // Differentiable and deterministic: no dropout, running statistics.
  static constexpr ForwardMode frozen() { return {true, false, false}; }
  // Differentiable and deterministic with batch statistics.
  static constexpr ForwardMode deterministic_train() { return {true, false, true}; }

  bool operator==(const ForwardMode&) const = default;
};

struct ForwardTrace {
  ForwardMode mode;
  // inputs[i] is the input of layer i; only filled when recording.
  std::vector<Matrix> inputs;
  // Dropout masks (0 or 1/(1-p)) and batch-norm caches, indexed by layer.
  std::vector<Matrix> masks;
  std::vector<Matrix> normalized;
  std::vector<Matrix> inv_std;
  std::vector<Matrix> batch_mean;
  std::vector<Matrix> batch_var;
  Matrix output;
};

// `rng` is only drawn from when dropout is active; it may be null otherwise.
ForwardTrace forward(const Network& net, const Matrix& batch, ForwardMode mode, Rng* rng);

// Running mean/variance update from a trace that used batch statistics:
// running = momentum * running + (1 - momentum) * batch.
void commit_batch_statistics(Network& net, const ForwardTrace& trace);

struct BackwardResult {
  std::vector<Matrix> param_grads;  // aligned with Network::trainable()
  Matrix input_grad;
};

// Gradients of sum(upstream .* output). Fails with kInvalidState on a trace
// recorded without `record`.
BackwardResult backward(const Network& net, const ForwardTrace& trace, const Matrix& upstream);

// Zero tensors shaped like net.trainable().
std::vector<Matrix> zero_gradients(const Network& net);
void accumulate(std::vector<Matrix>& into, const std::vector<Matrix>& grads);

// max over entries of |a - n| / max(|a|, |n|, 1e-6); the floor absorbs
// finite-difference roundoff on entries whose gradient is near zero.
double max_relative_error(std::span<const Matrix> analytic, std::span<const Matrix> numeric);

// Central finite differences of `objective` with respect to every entry of
// `params`. Each entry is restored after probing.
std::vector<Matrix> numeric_gradients(std::span<Matrix* const> params,
                                      const std::function<double()>& objective, double epsilon);

// Checks backward() against central differences for the scalar
// sum(R .* forward(batch)) where R is a fixed random projection. Covers all
// trainable parameters and the input. `mode` must record and must not use
// dropout.
double gradcheck(Network& net, const Matrix& batch, double epsilon,
                 ForwardMode mode = ForwardMode::frozen());

}  // namespace retrogan

#endif  // RETROGAN_NN_HPP
