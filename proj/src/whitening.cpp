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

#include "filterlearn/whitening.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "filterlearn/errors.hpp"

namespace filterlearn {

Eigen::MatrixXd covariance(const PatchMatrix& p) {
  if (p.cols() < 2) throw ArgumentError("covariance: need at least 2 samples");
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(p.rows(), p.rows());
  c.selfadjointView<Eigen::Lower>().rankUpdate(p);
  return c.selfadjointView<Eigen::Lower>();
}

WhiteningTransform compute_whitener(const PatchMatrix& p, Regularizer reg) {
  const Eigen::Index n = p.cols();
  if (n < 2) throw ArgumentError("compute_whitener: need at least 2 samples");
  if (!(reg.epsilon >= 0.0)) throw ArgumentError("compute_whitener: epsilon must be >= 0");
  if (!p.allFinite()) throw NumericError("compute_whitener: non-finite input");

  WhiteningTransform t;
  t.mean = p.rowwise().mean();
  const PatchMatrix centered = p.colwise() - t.mean;
  const Eigen::MatrixXd outer = covariance(centered);
  const Eigen::MatrixXd sym = 0.5 * (outer + outer.transpose());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw NumericError("compute_whitener: eigensolver failed");

  // Eigen returns ascending order.
  t.eigvals = eig.eigenvalues().reverse().cwiseMax(0.0);
  t.eigvecs = eig.eigenvectors().rowwise().reverse();

  t.epsilon = reg.mode == EpsilonMode::kRelative ? reg.epsilon * t.eigvals.mean() : reg.epsilon;
  const Eigen::VectorXd shifted = t.eigvals.array() + t.epsilon;
  if (shifted.minCoeff() <= 1e-12) {
    if (t.eigvals.maxCoeff() <= 1e-12)
      throw NumericError("compute_whitener: covariance is all zero (constant input)");
    throw NumericError("compute_whitener: ill-conditioned covariance, epsilon > 0 required");
  }

  const Eigen::VectorXd scale = std::sqrt(static_cast<double>(n - 1)) * shifted.array().rsqrt();
  t.w = t.eigvecs * scale.asDiagonal() * t.eigvecs.transpose();
  t.w = 0.5 * (t.w + t.w.transpose()).eval();
  return t;
}

PatchMatrix apply(const WhiteningTransform& t, const PatchMatrix& p) {
  if (p.rows() != t.w.cols() || t.mean.size() != p.rows())
    throw ArgumentError("apply: dimension mismatch (" + std::to_string(p.rows()) + " vs " +
                        std::to_string(t.w.cols()) + ")");
  return t.w * (p.colwise() - t.mean);
}

std::pair<PatchMatrix, WhiteningChain> iterated_whiten(const PatchMatrix& p, int k, Regularizer reg) {
  if (k < 0) throw ArgumentError("iterated_whiten: k must be >= 0");
  if (p.cols() < 1) throw ArgumentError("iterated_whiten: empty patch matrix");
  WhiteningChain chain;
  chain.base_mean = p.rowwise().mean();
  if (k == 0) return {p.colwise() - chain.base_mean, std::move(chain)};

  PatchMatrix u = p;
  chain.stages.reserve(k);
  for (int i = 0; i < k; ++i) {
    chain.stages.push_back(compute_whitener(u, reg));
    u = apply(chain.stages.back(), u);
  }
  return {std::move(u), std::move(chain)};
}

PatchMatrix apply_chain(const WhiteningChain& chain, const PatchMatrix& p) {
  if (chain.stages.empty()) {
    if (chain.base_mean.size() != p.rows()) throw ArgumentError("apply_chain: dimension mismatch");
    return p.colwise() - chain.base_mean;
  }
  PatchMatrix u = p;
  for (const WhiteningTransform& t : chain.stages) u = apply(t, u);
  return u;
}

}  // namespace filterlearn
