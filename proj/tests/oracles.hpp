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

// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

namespace filterlearn::oracle {

/// Central finite-difference gradient of a scalar function.
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double step = 1e-5) {
  Eigen::VectorXd grad(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double up = f(probe);
    probe[i] = x[i] - step;
    const double down = f(probe);
    probe[i] = x[i];
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

/// Largest entrywise deviation, relative to the larger of the two gradients'
/// infinity norms.
inline double gradient_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric) {
  const double scale = std::max({analytic.lpNorm<Eigen::Infinity>(), numeric.lpNorm<Eigen::Infinity>(), 1e-300});
  return (analytic - numeric).lpNorm<Eigen::Infinity>() / scale;
}

/// Direct evaluation of the sparse decoder objective from its definition,
/// written out with explicit loops.
inline double decoder_objective_loops(const Eigen::MatrixXd& w1, const Eigen::VectorXd& b1,
                                      const Eigen::MatrixXd& w2, const Eigen::VectorXd& b2,
                                      const Eigen::MatrixXd& p, double rho, double beta, double lambda) {
  const Eigen::Index d = p.rows(), n = p.cols(), h = w1.cols();
  Eigen::MatrixXd s(h, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < h; ++j) {
      double a = b1[j];
      for (Eigen::Index r = 0; r < d; ++r) a += w1(r, j) * p(r, i);
      s(j, i) = 1.0 / (1.0 + std::exp(-a));
    }
  double rec = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index r = 0; r < d; ++r) {
      double out = b2[r];
      for (Eigen::Index j = 0; j < h; ++j) out += w2(j, r) * s(j, i);
      rec += (out - p(r, i)) * (out - p(r, i));
    }
  double kl = 0.0;
  for (Eigen::Index j = 0; j < h; ++j) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += s(j, i);
    mean /= static_cast<double>(n);
    kl += rho * std::log(rho / mean) + (1 - rho) * std::log((1 - rho) / (1 - mean));
  }
  double decay = 0.0;
  for (Eigen::Index i = 0; i < w1.size(); ++i) decay += w1.data()[i] * w1.data()[i];
  for (Eigen::Index i = 0; i < w2.size(); ++i) decay += w2.data()[i] * w2.data()[i];
  return rec / static_cast<double>(n) + beta * kl + lambda * decay;
}

}  // namespace filterlearn::oracle
