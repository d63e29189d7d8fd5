// Copyright 2026 The vsod Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef VSOD_ERRORS_HPP_
#define VSOD_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace vsod {

// Base of every error raised by the library. The CLI maps ConfigError,
// InputError and ShapeError to exit code 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inconsistent configuration or parameter set.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Caller supplied an input that violates a precondition (size, missing flow).
class InputError : public Error {
 public:
  using Error::Error;
};

// Tensor shapes that cannot be combined.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Value outside the admissible domain (mask outside [0,1], non-finite flow).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Dataset directory cannot be ingested.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Sequence with fewer than two frames.
class EmptySequenceError : public IngestionError {
 public:
  using IngestionError::IngestionError;
};

// Non-finite logits during training.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace vsod

#endif  // VSOD_ERRORS_HPP_
