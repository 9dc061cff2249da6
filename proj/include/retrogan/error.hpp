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

#ifndef RETROGAN_ERROR_HPP
#define RETROGAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace retrogan {

// Values are mirrored by rg_status in retrogan.h; keep both in sync.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kShape = 2,
  kDegenerateVector = 3,
  kParse = 4,
  kDimension = 5,
  kEmpty = 6,
  kIo = 7,
  kConfig = 8,
  kConfigMismatch = 9,
  kCheckpoint = 10,
  kData = 11,
  kAlignment = 12,
  kVocabulary = 13,
  kUndefinedCorrelation = 14,
  kInsufficientConfounders = 15,
  kDomain = 16,
  kInvalidState = 17,
  kInternal = 18,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Shorthand used throughout the library.
[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace retrogan

#endif  // RETROGAN_ERROR_HPP
