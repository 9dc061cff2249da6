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

#include "retrogan/nn.hpp"

#include <algorithm>
#include <cmath>

namespace retrogan {

namespace {

void validate_chain(const std::vector<LayerSpec>& layers) {
  if (layers.empty()) fail(ErrorCode::kConfig, "network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const std::string where = "layer " + std::to_string(i) + " (" + layer_kind_name(l.kind) + ")";
    if (l.in_dim == 0 || l.out_dim == 0) fail(ErrorCode::kConfig, where + ": zero dimension");
    if (l.kind != LayerKind::kDense && l.in_dim != l.out_dim) {
      fail(ErrorCode::kConfig, where + ": elementwise layer must preserve width");
    }
    if (l.kind == LayerKind::kDropout && !(l.rate >= 0.0 && l.rate < 1.0)) {
      fail(ErrorCode::kConfig, where + ": dropout rate must lie in [0, 1)");
    }
    if (i > 0 && layers[i - 1].out_dim != l.in_dim) {
      fail(ErrorCode::kConfig, where + ": input width " + std::to_string(l.in_dim) +
                                   " does not follow previous output " +
                                   std::to_string(layers[i - 1].out_dim));
    }
  }
}

bool feeds_relu(const std::vector<LayerSpec>& layers, std::size_t i) {
  return i + 1 < layers.size() && layers[i + 1].kind == LayerKind::kRelu;
}

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

const char* layer_kind_name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::kDense: return "dense";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kSigmoid: return "sigmoid";
  }
  return "unknown";
}

Network::Network(std::vector<LayerSpec> layers, BatchNormSettings bn)
    : layers_(std::move(layers)), bn_(bn) {
  validate_chain(layers_);
  if (!(bn_.epsilon > 0.0) || !(bn_.momentum >= 0.0 && bn_.momentum < 1.0)) {
    fail(ErrorCode::kConfig, "batch-norm epsilon must be > 0 and momentum in [0, 1)");
  }
  params_.resize(layers_.size());
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    LayerParams& p = params_[i];
    if (l.kind == LayerKind::kDense) {
      p.weight = Matrix(l.in_dim, l.out_dim);
      p.bias = Matrix(1, l.out_dim);
    } else if (l.kind == LayerKind::kBatchNorm) {
      p.gamma = Matrix(1, l.out_dim, 1.0);
      p.beta = Matrix(1, l.out_dim);
      p.running_mean = Matrix(1, l.out_dim);
      p.running_var = Matrix(1, l.out_dim, 1.0);
    }
  }
}

std::size_t Network::input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().in_dim; }
std::size_t Network::output_dim() const noexcept { return layers_.empty() ? 0 : layers_.back().out_dim; }

void Network::initialize(Rng& rng) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const LayerSpec& l = layers_[i];
    LayerParams& p = params_[i];
    if (l.kind == LayerKind::kDense) {
      const double gain = feeds_relu(layers_, i) ? 2.0 : 1.0;
      p.weight = draw_gaussian(rng, l.in_dim, l.out_dim, 0.0,
                               std::sqrt(gain / static_cast<double>(l.in_dim)));
      p.bias.fill(0.0);
    } else if (l.kind == LayerKind::kBatchNorm) {
      p.gamma.fill(1.0);
      p.beta.fill(0.0);
      p.running_mean.fill(0.0);
      p.running_var.fill(1.0);
    }
  }
}

std::vector<Matrix*> Network::trainable() {
  std::vector<Matrix*> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::kDense) {
      out.push_back(&params_[i].weight);
      out.push_back(&params_[i].bias);
    } else if (layers_[i].kind == LayerKind::kBatchNorm) {
      out.push_back(&params_[i].gamma);
      out.push_back(&params_[i].beta);
    }
  }
  return out;
}

std::vector<const Matrix*> Network::trainable() const {
  auto mut = const_cast<Network*>(this)->trainable();
  return {mut.begin(), mut.end()};
}

std::vector<Matrix*> Network::state_tensors() {
  std::vector<Matrix*> out;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (layers_[i].kind == LayerKind::kDense) {
      out.push_back(&params_[i].weight);
      out.push_back(&params_[i].bias);
    } else if (layers_[i].kind == LayerKind::kBatchNorm) {
      out.push_back(&params_[i].gamma);
      out.push_back(&params_[i].beta);
      out.push_back(&params_[i].running_mean);
      out.push_back(&params_[i].running_var);
    }
  }
  return out;
}

std::vector<const Matrix*> Network::state_tensors() const {
  auto mut = const_cast<Network*>(this)->state_tensors();
  return {mut.begin(), mut.end()};
}

std::size_t Network::parameter_count() const { return retrogan::parameter_count(layers_); }

std::size_t parameter_count(std::span<const LayerSpec> layers) {
  std::size_t total = 0;
  for (const LayerSpec& l : layers) {
    if (l.kind == LayerKind::kDense) total += l.in_dim * l.out_dim + l.out_dim;
    if (l.kind == LayerKind::kBatchNorm) total += 2 * l.out_dim;
  }
  return total;
}

ForwardTrace forward(const Network& net, const Matrix& batch, ForwardMode mode, Rng* rng) {
  if (batch.cols() != net.input_dim()) {
    fail(ErrorCode::kShape, "forward: batch width " + std::to_string(batch.cols()) +
                                " does not match network input " +
                                std::to_string(net.input_dim()));
  }
  const auto& layers = net.layers();
  const std::size_t n = layers.size();
  ForwardTrace trace;
  trace.mode = mode;
  if (mode.record) {
    trace.inputs.resize(n);
    trace.masks.resize(n);
    trace.normalized.resize(n);
    trace.inv_std.resize(n);
  }
  trace.batch_mean.resize(n);
  trace.batch_var.resize(n);

  Matrix current = batch;
  for (std::size_t i = 0; i < n; ++i) {
    const LayerSpec& l = layers[i];
    const LayerParams& p = net.params()[i];
    if (mode.record) trace.inputs[i] = current;
    switch (l.kind) {
      case LayerKind::kDense: {
        Matrix out = matmul(current, p.weight);
        for (std::size_t r = 0; r < out.rows(); ++r) {
          auto row = out.row(r);
          for (std::size_t c = 0; c < out.cols(); ++c) row[c] += p.bias(0, c);
        }
        current = std::move(out);
        break;
      }
      case LayerKind::kRelu:
        for (double& v : current.values()) v = v > 0.0 ? v : 0.0;
        break;
      case LayerKind::kDropout: {
        if (!mode.dropout || l.rate == 0.0) break;
        if (rng == nullptr) fail(ErrorCode::kInvalidState, "dropout requires a random stream");
        Matrix mask(current.rows(), current.cols());
        const double keep_scale = 1.0 / (1.0 - l.rate);
        auto m = mask.values();
        auto v = current.values();
        for (std::size_t k = 0; k < m.size(); ++k) {
          m[k] = rng->uniform() < l.rate ? 0.0 : keep_scale;
          v[k] *= m[k];
        }
        if (mode.record) trace.masks[i] = std::move(mask);
        break;
      }
      case LayerKind::kBatchNorm: {
        const std::size_t rows = current.rows();
        const std::size_t cols = current.cols();
        Matrix mean(1, cols);
        Matrix var(1, cols);
        if (mode.batch_stats) {
          if (rows == 0) fail(ErrorCode::kShape, "batch norm needs at least one row");
          mean = column_sums(current);
          for (double& m : mean.values()) m /= static_cast<double>(rows);
          for (std::size_t r = 0; r < rows; ++r) {
            const auto row = current.row(r);
            for (std::size_t c = 0; c < cols; ++c) {
              const double d = row[c] - mean(0, c);
              var(0, c) += d * d;
            }
          }
          for (double& s : var.values()) s /= static_cast<double>(rows);
          trace.batch_mean[i] = mean;
          trace.batch_var[i] = var;
        } else {
          mean = p.running_mean;
          var = p.running_var;
        }
        Matrix inv_std(1, cols);
        for (std::size_t c = 0; c < cols; ++c) {
          inv_std(0, c) = 1.0 / std::sqrt(var(0, c) + net.batchnorm_settings().epsilon);
        }
        Matrix normalized(rows, cols);
        for (std::size_t r = 0; r < rows; ++r) {
          auto src = current.row(r);
          auto dst = normalized.row(r);
          for (std::size_t c = 0; c < cols; ++c) {
            dst[c] = (src[c] - mean(0, c)) * inv_std(0, c);
            src[c] = p.gamma(0, c) * dst[c] + p.beta(0, c);
          }
        }
        if (mode.record) {
          trace.normalized[i] = std::move(normalized);
          trace.inv_std[i] = std::move(inv_std);
        }
        break;
      }
      case LayerKind::kSigmoid:
        for (double& v : current.values()) v = stable_sigmoid(v);
        break;
    }
  }
  trace.output = std::move(current);
  return trace;
}

void commit_batch_statistics(Network& net, const ForwardTrace& trace) {
  if (!trace.mode.batch_stats) return;
  const double momentum = net.batchnorm_settings().momentum;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    if (net.layers()[i].kind != LayerKind::kBatchNorm) continue;
    if (trace.batch_mean.size() <= i || trace.batch_mean[i].empty()) {
      fail(ErrorCode::kInvalidState, "trace carries no batch statistics");
    }
    LayerParams& p = net.params()[i];
    auto rm = p.running_mean.values();
    auto rv = p.running_var.values();
    auto bm = trace.batch_mean[i].values();
    auto bv = trace.batch_var[i].values();
    for (std::size_t c = 0; c < rm.size(); ++c) {
      rm[c] = momentum * rm[c] + (1.0 - momentum) * bm[c];
      rv[c] = momentum * rv[c] + (1.0 - momentum) * bv[c];
    }
  }
}

BackwardResult backward(const Network& net, const ForwardTrace& trace, const Matrix& upstream) {
  if (!trace.mode.record) {
    fail(ErrorCode::kInvalidState, "backward requires a trace recorded in a training mode");
  }
  const auto& layers = net.layers();
  if (trace.inputs.size() != layers.size()) {
    fail(ErrorCode::kInvalidState, "trace layer count does not match network");
  }
  if (upstream.rows() != trace.output.rows() || upstream.cols() != trace.output.cols()) {
    fail(ErrorCode::kShape, "backward: upstream " + upstream.shape_string() +
                                " does not match output " + trace.output.shape_string());
  }

  // Collect gradients per layer first, then flatten in trainable() order.
  std::vector<std::vector<Matrix>> per_layer(layers.size());
  Matrix grad = upstream;
  for (std::size_t idx = layers.size(); idx-- > 0;) {
    const LayerSpec& l = layers[idx];
    const LayerParams& p = net.params()[idx];
    const Matrix& input = trace.inputs[idx];
    switch (l.kind) {
      case LayerKind::kDense: {
        Matrix dw = matmul_at(input, grad);
        Matrix db = column_sums(grad);
        Matrix dx = matmul_bt(grad, p.weight);
        per_layer[idx] = {std::move(dw), std::move(db)};
        grad = std::move(dx);
        break;
      }
      case LayerKind::kRelu: {
        auto g = grad.values();
        auto x = input.values();
        for (std::size_t k = 0; k < g.size(); ++k) {
          if (!(x[k] > 0.0)) g[k] = 0.0;
        }
        break;
      }
      case LayerKind::kDropout: {
        const Matrix& mask = trace.masks[idx];
        if (mask.empty()) break;
        auto g = grad.values();
        auto m = mask.values();
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= m[k];
        break;
      }
      case LayerKind::kBatchNorm: {
        const Matrix& xhat = trace.normalized[idx];
        const Matrix& inv_std = trace.inv_std[idx];
        const std::size_t rows = grad.rows();
        const std::size_t cols = grad.cols();
        Matrix dgamma(1, cols);
        Matrix dbeta(1, cols);
        for (std::size_t r = 0; r < rows; ++r) {
          for (std::size_t c = 0; c < cols; ++c) {
            dgamma(0, c) += grad(r, c) * xhat(r, c);
            dbeta(0, c) += grad(r, c);
          }
        }
        Matrix dx(rows, cols);
        if (trace.mode.batch_stats) {
          // dx = inv_std / N * (N * dxhat - sum(dxhat) - xhat * sum(dxhat * xhat))
          const double n = static_cast<double>(rows);
          for (std::size_t c = 0; c < cols; ++c) {
            double sum_dxhat = 0.0;
            double sum_dxhat_xhat = 0.0;
            for (std::size_t r = 0; r < rows; ++r) {
              const double dxhat = grad(r, c) * p.gamma(0, c);
              sum_dxhat += dxhat;
              sum_dxhat_xhat += dxhat * xhat(r, c);
            }
            for (std::size_t r = 0; r < rows; ++r) {
              const double dxhat = grad(r, c) * p.gamma(0, c);
              dx(r, c) = inv_std(0, c) / n * (n * dxhat - sum_dxhat - xhat(r, c) * sum_dxhat_xhat);
            }
          }
        } else {
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) dx(r, c) = grad(r, c) * p.gamma(0, c) * inv_std(0, c);
          }
        }
        per_layer[idx] = {std::move(dgamma), std::move(dbeta)};
        grad = std::move(dx);
        break;
      }
      case LayerKind::kSigmoid: {
        // Output of this layer is the next layer's input, or the final output.
        const Matrix& out = idx + 1 < layers.size() ? trace.inputs[idx + 1] : trace.output;
        auto g = grad.values();
        auto y = out.values();
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= y[k] * (1.0 - y[k]);
        break;
      }
    }
  }

  BackwardResult result;
  for (auto& grads : per_layer) {
    for (auto& g : grads) result.param_grads.push_back(std::move(g));
  }
  result.input_grad = std::move(grad);
  return result;
}

std::vector<Matrix> zero_gradients(const Network& net) {
  std::vector<Matrix> out;
  for (const Matrix* t : net.trainable()) out.emplace_back(t->rows(), t->cols());
  return out;
}

void accumulate(std::vector<Matrix>& into, const std::vector<Matrix>& grads) {
  if (into.size() != grads.size()) fail(ErrorCode::kShape, "gradient list length mismatch");
  for (std::size_t i = 0; i < into.size(); ++i) add_in_place(into[i], grads[i]);
}

double max_relative_error(std::span<const Matrix> analytic, std::span<const Matrix> numeric) {
  if (analytic.size() != numeric.size()) fail(ErrorCode::kShape, "gradient list length mismatch");
  double worst = 0.0;
  for (std::size_t t = 0; t < analytic.size(); ++t) {
    const auto a = analytic[t].values();
    const auto n = numeric[t].values();
    if (a.size() != n.size()) fail(ErrorCode::kShape, "gradient tensor shape mismatch");
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double denom = std::max({std::abs(a[k]), std::abs(n[k]), 1e-6});
      worst = std::max(worst, std::abs(a[k] - n[k]) / denom);
    }
  }
  return worst;
}

std::vector<Matrix> numeric_gradients(std::span<Matrix* const> params,
                                      const std::function<double()>& objective, double epsilon) {
  std::vector<Matrix> out;
  out.reserve(params.size());
  for (Matrix* p : params) {
    Matrix g(p->rows(), p->cols());
    auto values = p->values();
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double saved = values[k];
      values[k] = saved + epsilon;
      const double plus = objective();
      values[k] = saved - epsilon;
      const double minus = objective();
      values[k] = saved;
      g.values()[k] = (plus - minus) / (2.0 * epsilon);
    }
    out.push_back(std::move(g));
  }
  return out;
}

double gradcheck(Network& net, const Matrix& batch, double epsilon, ForwardMode mode) {
  if (!mode.record || mode.dropout) {
    fail(ErrorCode::kInvalidArgument, "gradcheck needs a recording, dropout-free mode");
  }
  Rng rng(0x6772616463686BULL);
  const Matrix projection = draw_gaussian(rng, batch.rows(), net.output_dim(), 0.0, 1.0);
  Matrix input = batch;
  auto objective = [&]() {
    const ForwardTrace t = forward(net, input, mode, nullptr);
    return dot(t.output.values(), projection.values());
  };

  const ForwardTrace trace = forward(net, input, mode, nullptr);
  BackwardResult analytic = backward(net, trace, projection);
  analytic.param_grads.push_back(analytic.input_grad);

  std::vector<Matrix*> params = net.trainable();
  params.push_back(&input);
  const std::vector<Matrix> numeric = numeric_gradients(params, objective, epsilon);
  return max_relative_error(analytic.param_grads, numeric);
}

}  // namespace retrogan
