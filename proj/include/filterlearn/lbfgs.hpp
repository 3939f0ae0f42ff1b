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

#include <functional>

#include <Eigen/Dense>

namespace filterlearn {

/// Returns f(x) and writes the gradient into `grad` (already sized like x).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int max_iterations = 400;
  double tolerance = 1e-7;  // stop when |f_prev - f| / max(|f_prev|, |f|) < tolerance
  int memory = 20;
  double gradient_tolerance = 1e-12;  // infinity norm
};

enum class StopReason {
  kGradient,       // gradient vanished
  kTolerance,      // relative objective change below tolerance
  kMaxIterations,
  kLineSearch,     // no step achieved sufficient decrease
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double f_initial = 0.0;
  int iterations = 0;
  int evaluations = 0;
  StopReason reason = StopReason::kMaxIterations;
};

/// Limited-memory BFGS with the two-loop recursion and an Armijo backtracking
/// line search. Every accepted step strictly decreases f, so result.f <= f(x0).
/// Throws OptimizationError (carrying the last finite iterate) when f turns
/// non-finite, and ArgumentError when f(x0) itself is not finite.
LbfgsResult minimize(const Objective& fn, const Eigen::VectorXd& x0, const LbfgsOptions& opts);

}  // namespace filterlearn
