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

// Sparse linear decoder: a sigmoid hidden layer with a linear output layer,
// trained with L-BFGS on
//
//   J = (1/n) ||W2^T s + b2 - P||_F^2 + beta * sum_j KL(rho || rho_hat_j)
//       + lambda (||W1||_F^2 + ||W2||_F^2),     s = sigmoid(W1^T P + b1)
//
// where rho_hat_j is the mean activation of hidden unit j over the batch.
// Flattened parameter layout: [W1 (d x h), b1 (h), W2 (h x d), b2 (d)], each
// matrix column-major.

#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "filterlearn/image.hpp"
#include "filterlearn/lbfgs.hpp"

namespace filterlearn {

struct TrainingConfig {
  double rho = 0.035;
  double beta = 5.0;
  double lambda = 3e-3;
  int max_iterations = 400;
  double tolerance = 1e-7;
  int memory = 20;

  void validate() const;
  /// Stable hex digest of every field; recorded in FilterSet provenance.
  std::string digest() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct Provenance {
  int k = 0;             // whitening iterations applied to the training data
  double epsilon = 0.0;  // regularizer used for that whitening
  std::uint64_t seed = 0;
  std::string config_digest;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FilterSet {
  Eigen::MatrixXd w1;  // d x h; column j is filter j
  Eigen::VectorXd b1;  // h
  Eigen::MatrixXd w2;  // h x d
  Eigen::VectorXd b2;  // d
  Provenance provenance;

  int d() const noexcept { return static_cast<int>(w1.rows()); }
  int h() const noexcept { return static_cast<int>(w1.cols()); }

  /// Throws ArgumentError on inconsistent shapes or non-finite entries.
  void validate() const;

  friend bool operator==(const FilterSet& a, const FilterSet& b) {
    return exactly_equal(a.w1, b.w1) && exactly_equal(a.b1, b.b1) && exactly_equal(a.w2, b.w2) &&
           exactly_equal(a.b2, b.b2) && a.provenance == b.provenance;
  }
};

Eigen::Index parameter_count(int d, int h);
Eigen::VectorXd pack_parameters(const FilterSet& f);
FilterSet unpack_parameters(const Eigen::VectorXd& params, int d, int h);

/// h x n activations sigmoid(W1^T P + b1), entries in (0,1).
Eigen::MatrixXd forward(const FilterSet& f, const PatchMatrix& p);

/// d x n linear reconstruction W2^T s + b2.
PatchMatrix reconstruct(const FilterSet& f, const Eigen::MatrixXd& s);

/// Bernoulli KL divergence; throws NumericError when rho_hat is 0 or 1.
double kl_divergence(double rho, double rho_hat);

/// Mean activation per hidden unit over the columns of p.
Eigen::VectorXd mean_activation(const FilterSet& f, const PatchMatrix& p);

/// Objective value; the analytic gradient is written into `grad`.
/// rho_hat is clamped to [1e-12, 1 - 1e-12] before the KL term.
double objective_and_gradient(const Eigen::VectorXd& params, const PatchMatrix& p, int h,
                              const TrainingConfig& cfg, Eigen::VectorXd& grad);

struct TrainingReport {
  double initial_objective = 0.0;
  double final_objective = 0.0;
  int iterations = 0;
  StopReason reason = StopReason::kMaxIterations;
};

/// Uniform init in [-r, r], r = sqrt(6 / (d + h + 1)), zero biases, then
/// L-BFGS. `p` must already be preprocessed (whitened or centered).
FilterSet train(const PatchMatrix& p, int h, const TrainingConfig& cfg, std::uint64_t seed,
                TrainingReport* report = nullptr);

}  // namespace filterlearn
