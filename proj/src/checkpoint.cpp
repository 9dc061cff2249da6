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

#include "retrogan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "retrogan/run_config.hpp"

namespace retrogan {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'T', 'R', 'O', 'G', 'A', 'N'};
// Guards against absurd allocations when a length field is corrupt.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 34;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void tensor(const Matrix& m) {
    u64(m.rows());
    u64(m.cols());
    for (double v : m.values()) f64(v);
  }
  std::string& str() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  Reader(std::string_view in, std::string source) : in_(in), source_(std::move(source)) {}

  [[noreturn]] void corrupt(const std::string& what) const {
    fail(ErrorCode::kCheckpoint, source_ + ": " + what + " at byte " + std::to_string(pos_));
  }
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) corrupt("truncated checkpoint");
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    const auto out = in_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint32_t u32() {
    const auto b = bytes(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::uint64_t u64() {
    const auto b = bytes(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count(const char* what) {
    const std::uint64_t n = u64();
    if (n > kMaxElements) corrupt(std::string("implausible ") + what + " " + std::to_string(n));
    return static_cast<std::size_t>(n);
  }
  // Reads a tensor into `target`, which must already have the stored shape.
  void tensor_into(Matrix& target, const std::string& label) {
    const std::size_t rows = count("row count");
    const std::size_t cols = count("column count");
    if (rows != target.rows() || cols != target.cols()) {
      corrupt(label + " has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
              ", expected " + target.shape_string());
    }
    need(rows * cols * 8);
    for (double& v : target.values()) v = f64();
  }
  std::size_t position() const { return pos_; }

 private:
  std::string_view in_;
  std::string source_;
  std::size_t pos_ = 0;
};

const char* const kNetworkNames[] = {"G", "F", "D_X", "D_Y", "D_cX", "D_cY"};

void write_arch(Writer& w, const ArchitectureConfig& a) {
  w.u64(a.dim);
  w.u64(a.generator_size);
  w.u64(a.generator_hidden_layers);
  w.f64(a.generator_dropout);
  w.u64(a.discriminator_size);
  w.u64(a.discriminator_hidden_layers);
  w.f64(a.discriminator_dropout);
  w.f64(a.batchnorm.epsilon);
  w.f64(a.batchnorm.momentum);
}

ArchitectureConfig read_arch(Reader& r) {
  ArchitectureConfig a;
  a.dim = r.count("dim");
  a.generator_size = r.count("generator_size");
  a.generator_hidden_layers = r.count("generator_hidden_layers");
  a.generator_dropout = r.f64();
  a.discriminator_size = r.count("discriminator_size");
  a.discriminator_hidden_layers = r.count("discriminator_hidden_layers");
  a.discriminator_dropout = r.f64();
  a.batchnorm.epsilon = r.f64();
  a.batchnorm.momentum = r.f64();
  return a;
}

}  // namespace

std::string serialize_checkpoint(const TrainerState& state, const TrainConfig& config) {
  Writer w;
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kCheckpointVersion);
  write_arch(w, state.model.arch);
  w.u64(state.step);
  w.u64(state.seed);
  const std::string cfg = to_json(config).dump();
  w.u64(cfg.size());
  w.bytes(cfg.data(), cfg.size());

  for (const Network* net : state.model.networks()) {
    const auto tensors = net->state_tensors();
    w.u64(tensors.size());
    for (const Matrix* t : tensors) w.tensor(*t);
  }
  for (const AdamState* opt : state.optimizers()) {
    w.u64(opt->step);
    w.f64(opt->settings.learning_rate);
    w.f64(opt->settings.beta1);
    w.f64(opt->settings.beta2);
    w.f64(opt->settings.epsilon);
    w.u64(opt->m.size());
    for (const Matrix& m : opt->m) w.tensor(m);
    for (const Matrix& v : opt->v) w.tensor(v);
  }
  w.u64(fnv1a(w.str()));
  return std::move(w.str());
}

Checkpoint deserialize_checkpoint(std::string_view bytes, const ArchitectureConfig* expected,
                                  const std::string& source) {
  if (bytes.size() < sizeof(kMagic) + 12) {
    fail(ErrorCode::kCheckpoint, source + ": file too short to be a checkpoint");
  }
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    fail(ErrorCode::kCheckpoint, source + ": not a RetroGAN checkpoint (bad magic)");
  }
  const std::string_view body = bytes.substr(0, bytes.size() - 8);
  Reader tail(bytes.substr(bytes.size() - 8), source);
  if (tail.u64() != fnv1a(body)) fail(ErrorCode::kCheckpoint, source + ": checksum mismatch");

  Reader r(body, source);
  r.bytes(sizeof(kMagic));
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    fail(ErrorCode::kCheckpoint, source + ": unsupported checkpoint version " + std::to_string(version));
  }
  const ArchitectureConfig arch = read_arch(r);
  try {
    arch.validate();
  } catch (const Error& e) {
    r.corrupt(std::string("invalid architecture block (") + e.what() + ")");
  }
  if (expected != nullptr && *expected != arch) {
    fail(ErrorCode::kConfigMismatch,
         source + ": checkpoint architecture (dim " + std::to_string(arch.dim) + ", generator " +
             std::to_string(arch.generator_hidden_layers) + "x" + std::to_string(arch.generator_size) +
             ", discriminator " + std::to_string(arch.discriminator_hidden_layers) + "x" +
             std::to_string(arch.discriminator_size) + ") does not match the requested one (dim " +
             std::to_string(expected->dim) + ", generator " +
             std::to_string(expected->generator_hidden_layers) + "x" +
             std::to_string(expected->generator_size) + ", discriminator " +
             std::to_string(expected->discriminator_hidden_layers) + "x" +
             std::to_string(expected->discriminator_size) + ")");
  }

  Checkpoint out;
  TrainerState& state = out.state;
  state.step = r.u64();
  state.seed = r.u64();
  const std::size_t cfg_len = r.count("config length");
  const std::string_view cfg_text = r.bytes(cfg_len);
  try {
    TrainConfig base;
    base.architecture = arch;
    out.config = train_config_from_json(nlohmann::json::parse(cfg_text), base);
  } catch (const nlohmann::json::exception& e) {
    r.corrupt(std::string("unreadable config block (") + e.what() + ")");
  } catch (const Error& e) {
    r.corrupt(std::string("invalid config block (") + e.what() + ")");
  }

  // Shapes come from the architecture; values are overwritten below.
  state.model = build_model(arch, Rng(0));
  auto nets = state.model.networks();
  for (std::size_t n = 0; n < nets.size(); ++n) {
    auto tensors = nets[n]->state_tensors();
    const std::size_t count = r.count("tensor count");
    if (count != tensors.size()) {
      r.corrupt(std::string(kNetworkNames[n]) + " stores " + std::to_string(count) +
                " tensors, expected " + std::to_string(tensors.size()));
    }
    for (std::size_t t = 0; t < tensors.size(); ++t) {
      r.tensor_into(*tensors[t], std::string(kNetworkNames[n]) + " tensor " + std::to_string(t));
    }
  }
  auto opts = state.optimizers();
  for (std::size_t n = 0; n < opts.size(); ++n) {
    AdamState& opt = *opts[n];
    const auto params = std::as_const(*nets[n]).trainable();
    opt.step = r.u64();
    opt.settings.learning_rate = r.f64();
    opt.settings.beta1 = r.f64();
    opt.settings.beta2 = r.f64();
    opt.settings.epsilon = r.f64();
    const std::size_t count = r.count("moment count");
    if (count != params.size()) {
      r.corrupt(std::string("optimizer for ") + kNetworkNames[n] + " stores " + std::to_string(count) +
                " moments, expected " + std::to_string(params.size()));
    }
    opt = AdamState{opt.settings, opt.step, {}, {}};
    for (const Matrix* p : params) opt.m.emplace_back(p->rows(), p->cols());
    for (const Matrix* p : params) opt.v.emplace_back(p->rows(), p->cols());
    for (std::size_t t = 0; t < count; ++t) r.tensor_into(opt.m[t], "first moment");
    for (std::size_t t = 0; t < count; ++t) r.tensor_into(opt.v[t], "second moment");
  }
  if (r.position() != body.size()) r.corrupt("trailing bytes");
  return out;
}

void save_checkpoint(const TrainerState& state, const TrainConfig& config,
                     const std::filesystem::path& path) {
  const std::string bytes = serialize_checkpoint(state, config);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot write checkpoint '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIo, "failed writing checkpoint '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ArchitectureConfig* expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kCheckpoint, "cannot open checkpoint '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return deserialize_checkpoint(buffer.str(), expected, path.string());
}

}  // namespace retrogan
