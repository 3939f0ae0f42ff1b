// Copyright 2026 The filterlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace filterlearn {

/// Precondition violated by the caller (bad dimension, negative sigma, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// File could not be opened, read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File contents do not follow the expected layout.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values, singular systems, probabilities on the boundary.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input has no variation where variation is required (constant vectors).
class DegenerateInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimizer hit a non-finite objective. Carries the last finite iterate.
class OptimizationError : public std::runtime_error {
 public:
  OptimizationError(const std::string& what, Eigen::VectorXd last_good)
      : std::runtime_error(what), last_good_(std::move(last_good)) {}

  const Eigen::VectorXd& last_good() const noexcept { return last_good_; }

 private:
  Eigen::VectorXd last_good_;
};

}  // namespace filterlearn
