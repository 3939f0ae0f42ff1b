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

#include "filterlearn/decoder.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "filterlearn/errors.hpp"
#include "filterlearn/random.hpp"

namespace filterlearn {
namespace {

constexpr double kRhoHatFloor = 1e-12;

Eigen::ArrayXXd sigmoid(const Eigen::MatrixXd& a) { return (1.0 + (-a.array()).exp()).inverse(); }

struct ParameterViews {
  Eigen::Map<const Eigen::MatrixXd> w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> w2;
  Eigen::Map<const Eigen::VectorXd> b2;

  ParameterViews(const double* data, int d, int h)
      : w1(data, d, h),
        b1(data + static_cast<Eigen::Index>(d) * h, h),
        w2(data + static_cast<Eigen::Index>(d) * h + h, h, d),
        b2(data + 2 * static_cast<Eigen::Index>(d) * h + h, d) {}
};

}  // namespace

void TrainingConfig::validate() const {
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("TrainingConfig: rho must be in (0,1)");
  if (!(beta >= 0.0)) throw ArgumentError("TrainingConfig: beta must be >= 0");
  if (!(lambda >= 0.0)) throw ArgumentError("TrainingConfig: lambda must be >= 0");
  if (max_iterations < 0) throw ArgumentError("TrainingConfig: max_iterations must be >= 0");
  if (memory < 1) throw ArgumentError("TrainingConfig: memory must be >= 1");
}

std::string TrainingConfig::digest() const {
  std::ostringstream text;
  text.precision(17);
  text << rho << ';' << beta << ';' << lambda << ';' << max_iterations << ';' << tolerance << ';'
       << memory;
  // FNV-1a, 64 bit.
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text.str()) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void FilterSet::validate() const {
  if (h() < 1 || d() < 1) throw ArgumentError("FilterSet: empty weights");
  if (b1.size() != h() || w2.rows() != h() || w2.cols() != d() || b2.size() != d())
    throw ArgumentError("FilterSet: inconsistent dimensions");
  if (!w1.allFinite() || !b1.allFinite() || !w2.allFinite() || !b2.allFinite())
    throw ArgumentError("FilterSet: non-finite parameters");
}

Eigen::Index parameter_count(int d, int h) { return 2 * static_cast<Eigen::Index>(d) * h + h + d; }

Eigen::VectorXd pack_parameters(const FilterSet& f) {
  const int d = f.d();
  const int h = f.h();
  Eigen::VectorXd params(parameter_count(d, h));
  Eigen::Index at = 0;
  auto put = [&](const auto& m) {
    params.segment(at, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    at += m.size();
  };
  put(f.w1);
  put(f.b1);
  put(f.w2);
  put(f.b2);
  return params;
}

FilterSet unpack_parameters(const Eigen::VectorXd& params, int d, int h) {
  if (d < 1 || h < 1 || params.size() != parameter_count(d, h))
    throw ArgumentError("unpack_parameters: length does not match (d, h)");
  const ParameterViews v(params.data(), d, h);
  FilterSet f;
  f.w1 = v.w1;
  f.b1 = v.b1;
  f.w2 = v.w2;
  f.b2 = v.b2;
  return f;
}

Eigen::MatrixXd forward(const FilterSet& f, const PatchMatrix& p) {
  if (p.rows() != f.d()) throw ArgumentError("forward: patch dimension does not match filters");
  Eigen::MatrixXd a = f.w1.transpose() * p;
  a.colwise() += f.b1;
  return sigmoid(a).matrix();
}

PatchMatrix reconstruct(const FilterSet& f, const Eigen::MatrixXd& s) {
  if (s.rows() != f.h()) throw ArgumentError("reconstruct: activation rows do not match h");
  PatchMatrix out = f.w2.transpose() * s;
  out.colwise() += f.b2;
  return out;
}

double kl_divergence(double rho, double rho_hat) {
  if (!(rho > 0.0 && rho < 1.0)) throw ArgumentError("kl_divergence: rho must be in (0,1)");
  if (!(rho_hat > 0.0 && rho_hat < 1.0))
    throw NumericError("kl_divergence: rho_hat on or outside the (0,1) boundary");
  return rho * std::log(rho / rho_hat) + (1.0 - rho) * std::log((1.0 - rho) / (1.0 - rho_hat));
}

Eigen::VectorXd mean_activation(const FilterSet& f, const PatchMatrix& p) {
  return forward(f, p).rowwise().mean();
}

double objective_and_gradient(const Eigen::VectorXd& params, const PatchMatrix& p, int h,
                              const TrainingConfig& cfg, Eigen::VectorXd& grad) {
  const int d = static_cast<int>(p.rows());
  const Eigen::Index n = p.cols();
  if (n < 1) throw ArgumentError("objective_and_gradient: empty batch");
  if (h < 1 || params.size() != parameter_count(d, h))
    throw ArgumentError("objective_and_gradient: parameter length does not match (d, h)");

  const ParameterViews v(params.data(), d, h);
  const double inv_n = 1.0 / static_cast<double>(n);

  Eigen::MatrixXd a = v.w1.transpose() * p;
  a.colwise() += v.b1;
  const Eigen::MatrixXd s = sigmoid(a).matrix();

  Eigen::MatrixXd residual = v.w2.transpose() * s - p;
  residual.colwise() += v.b2;

  const Eigen::ArrayXd rho_hat =
      (s.rowwise().sum() * inv_n).array().max(kRhoHatFloor).min(1.0 - kRhoHatFloor);
  const double rho = cfg.rho;
  const double sparsity =
      (rho * (rho / rho_hat).log() + (1.0 - rho) * ((1.0 - rho) / (1.0 - rho_hat)).log()).sum();

  const double j = residual.squaredNorm() * inv_n + cfg.beta * sparsity +
                   cfg.lambda * (v.w1.squaredNorm() + v.w2.squaredNorm());

  grad.resize(params.size());
  Eigen::Map<Eigen::MatrixXd> gw1(grad.data(), d, h);
  Eigen::Map<Eigen::VectorXd> gb1(grad.data() + static_cast<Eigen::Index>(d) * h, h);
  Eigen::Map<Eigen::MatrixXd> gw2(grad.data() + static_cast<Eigen::Index>(d) * h + h, h, d);
  Eigen::Map<Eigen::VectorXd> gb2(grad.data() + 2 * static_cast<Eigen::Index>(d) * h + h, d);

  const Eigen::MatrixXd d_out = (2.0 * inv_n) * residual;  // dJ/dP~
  gw2.noalias() = s * d_out.transpose();
  gw2 += (2.0 * cfg.lambda) * v.w2;
  gb2 = d_out.rowwise().sum();

  const Eigen::VectorXd d_rho_hat =
      (cfg.beta * inv_n) * (-rho / rho_hat + (1.0 - rho) / (1.0 - rho_hat)).matrix();
  Eigen::MatrixXd d_s = v.w2 * d_out;
  d_s.colwise() += d_rho_hat;
  const Eigen::MatrixXd d_a = (d_s.array() * s.array() * (1.0 - s.array())).matrix();

  gw1.noalias() = p * d_a.transpose();
  gw1 += (2.0 * cfg.lambda) * v.w1;
  gb1 = d_a.rowwise().sum();
  return j;
}

FilterSet train(const PatchMatrix& p, int h, const TrainingConfig& cfg, std::uint64_t seed,
                TrainingReport* report) {
  cfg.validate();
  if (h < 1) throw ArgumentError("train: h must be >= 1");
  if (p.cols() < 1 || p.rows() < 1) throw ArgumentError("train: empty patch matrix");
  if (!p.allFinite()) throw ArgumentError("train: non-finite training data");
  const int d = static_cast<int>(p.rows());

  Rng rng(seed);
  const double r = std::sqrt(6.0) / std::sqrt(static_cast<double>(d + h + 1));
  std::uniform_real_distribution<double> init(-r, r);
  FilterSet start;
  start.w1.resize(d, h);
  for (Eigen::Index i = 0; i < start.w1.size(); ++i) start.w1.data()[i] = init(rng);
  start.b1 = Eigen::VectorXd::Zero(h);
  start.w2.resize(h, d);
  for (Eigen::Index i = 0; i < start.w2.size(); ++i) start.w2.data()[i] = init(rng);
  start.b2 = Eigen::VectorXd::Zero(d);

  const Objective objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    return objective_and_gradient(x, p, h, cfg, grad);
  };
  LbfgsOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.tolerance = cfg.tolerance;
  opts.memory = cfg.memory;
  const LbfgsResult result = minimize(objective, pack_parameters(start), opts);

  FilterSet out = unpack_parameters(result.x, d, h);
  out.provenance.seed = seed;
  out.provenance.config_digest = cfg.digest();
  if (report) {
    report->initial_objective = result.f_initial;
    report->final_objective = result.f;
    report->iterations = result.iterations;
    report->reason = result.reason;
  }
  return out;
}

}  // namespace filterlearn
