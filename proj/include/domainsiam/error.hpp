// Copyright 2026 the domainsiam authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace domainsiam {

// Argument outside the domain of a loss (non-finite residual, y outside [0,1],
// malformed LossParams).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyBatch : public std::invalid_argument {
 public:
  EmptyBatch() : std::invalid_argument("empty batch") {}
};

// grad_alpha requested where a limiting branch (L2, log, Welsch) is active.
class UnsupportedBranch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Divergence : public std::runtime_error {
 public:
  explicit Divergence(std::size_t iteration)
      : std::runtime_error("training diverged at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class LostTarget : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidSpec : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or unknown configuration keys; maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace domainsiam
