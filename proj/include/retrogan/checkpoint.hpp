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

// Binary checkpoint format. All integers are little-endian u64 unless noted,
// all reals little-endian IEEE-754 binary64.
//
//   "RETROGAN"                       8 magic bytes
//   u32 version                      currently 1
//   architecture block               dim, generator_size, generator_hidden_layers,
//                                    generator_dropout (f64), discriminator_size,
//                                    discriminator_hidden_layers,
//                                    discriminator_dropout (f64),
//                                    batchnorm epsilon (f64), momentum (f64)
//   step, seed                       the trainer's RNG state: every draw is
//                                    keyed by (seed, step, site)
//   u64 n + n bytes                  TrainConfig as JSON
//   6 x network                      G, F, D_X, D_Y, D_cX, D_cY; u64 tensor count,
//                                    then per tensor u64 rows, u64 cols, data
//                                    (declared layer order, running stats included)
//   6 x optimizer                    u64 t, f64 lr, b1, b2, eps, u64 n,
//                                    n first-moment tensors, n second-moment tensors
//   u64 FNV-1a hash                  of every preceding byte

#ifndef RETROGAN_CHECKPOINT_HPP
#define RETROGAN_CHECKPOINT_HPP

#include <filesystem>
#include <string>

#include "retrogan/trainer.hpp"

namespace retrogan {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainerState state;
  TrainConfig config;

  bool operator==(const Checkpoint&) const = default;
};

std::string serialize_checkpoint(const TrainerState& state, const TrainConfig& config);
// `source` only labels error messages.
Checkpoint deserialize_checkpoint(std::string_view bytes, const ArchitectureConfig* expected = nullptr,
                                  const std::string& source = "<memory>");

void save_checkpoint(const TrainerState& state, const TrainConfig& config,
                     const std::filesystem::path& path);
// With `expected` set, a different stored architecture is kConfigMismatch.
// Anything unreadable is kCheckpoint.
Checkpoint load_checkpoint(const std::filesystem::path& path,
                           const ArchitectureConfig* expected = nullptr);

}  // namespace retrogan

#endif  // RETROGAN_CHECKPOINT_HPP
