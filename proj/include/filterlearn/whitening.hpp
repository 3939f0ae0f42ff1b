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

// ZCA whitening and its iterated extension.
//
// For centered data u (d x n) with u u^T = V diag(L) V^T the whitener is
//
//   W = sqrt(n - 1) * V (L + eps)^{-1/2} V^T
//
// so that at eps = 0 the output P = W u satisfies P P^T = (n - 1) I. Iterating
// (refit on the previous output, reapply) removes the residual bias that a
// positive eps leaves behind.

#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "filterlearn/image.hpp"

namespace filterlearn {

enum class EpsilonMode {
  kAbsolute,  // added to the eigenvalues of u u^T as is
  kRelative,  // scaled by the mean eigenvalue first
};

struct Regularizer {
  double epsilon = 0.01;
  EpsilonMode mode = EpsilonMode::kRelative;

  /// eps = 0.01 * mean(L); single-pass ZCA.
  static Regularizer standard() { return {0.01, EpsilonMode::kRelative}; }
  /// eps = 0.1 absolute; the regime used with k = 10 iterations.
  static Regularizer high_k() { return {0.1, EpsilonMode::kAbsolute}; }
  static Regularizer none() { return {0.0, EpsilonMode::kAbsolute}; }

  friend bool operator==(const Regularizer&, const Regularizer&) = default;
};

struct WhiteningTransform {
  Eigen::MatrixXd w;        // d x d, symmetric
  double epsilon = 0.0;     // effective (absolute) value added to eigvals
  Eigen::VectorXd mean;     // per-feature mean removed before w
  Eigen::VectorXd eigvals;  // of u u^T, descending, clamped at 0
  Eigen::MatrixXd eigvecs;  // columns match eigvals

  int dim() const noexcept { return static_cast<int>(w.rows()); }

  friend bool operator==(const WhiteningTransform& a, const WhiteningTransform& b) {
    return exactly_equal(a.w, b.w) && a.epsilon == b.epsilon && exactly_equal(a.mean, b.mean) &&
           exactly_equal(a.eigvals, b.eigvals) && exactly_equal(a.eigvecs, b.eigvecs);
  }
};

struct WhiteningChain {
  Eigen::VectorXd base_mean;  // mean of the raw input; used when k = 0
  std::vector<WhiteningTransform> stages;

  int k() const noexcept { return static_cast<int>(stages.size()); }

  friend bool operator==(const WhiteningChain& a, const WhiteningChain& b) {
    return exactly_equal(a.base_mean, b.base_mean) && a.stages == b.stages;
  }
};

/// P P^T for already-centered P. Requires n >= 2.
Eigen::MatrixXd covariance(const PatchMatrix& p);

/// Fits one ZCA stage on the rows of `p` (features) over its columns (samples).
WhiteningTransform compute_whitener(const PatchMatrix& p, Regularizer reg);

/// w * (p - mean).
PatchMatrix apply(const WhiteningTransform& t, const PatchMatrix& p);

/// k rounds of fit-then-apply. k = 0 only centers.
std::pair<PatchMatrix, WhiteningChain> iterated_whiten(const PatchMatrix& p, int k, Regularizer reg);

PatchMatrix apply_chain(const WhiteningChain& chain, const PatchMatrix& p);

}  // namespace filterlearn
