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

#include "filterlearn/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <vector>
#include <limits>

#include "filterlearn/errors.hpp"

namespace filterlearn {
namespace {

struct CurvaturePair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kMaxBacktracks = 60;

// Two-loop recursion: returns -H g.
Eigen::VectorXd search_direction(const std::deque<CurvaturePair>& history, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(history.size());
  for (std::size_t i = history.size(); i-- > 0;) {
    alpha[i] = history[i].rho * history[i].s.dot(q);
    q -= alpha[i] * history[i].y;
  }
  const CurvaturePair& last = history.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < history.size(); ++i) {
    const double beta = history[i].rho * history[i].y.dot(q);
    q += (alpha[i] - beta) * history[i].s;
  }
  return -q;
}

}  // namespace

LbfgsResult minimize(const Objective& fn, const Eigen::VectorXd& x0, const LbfgsOptions& opts) {
  if (opts.memory < 1) throw ArgumentError("minimize: memory must be >= 1");
  LbfgsResult result;
  result.x = x0;
  Eigen::VectorXd g(x0.size());
  double f = fn(result.x, g);
  result.evaluations = 1;
  if (!std::isfinite(f) || !g.allFinite()) throw ArgumentError("minimize: objective not finite at x0");
  result.f = result.f_initial = f;

  if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
    result.reason = StopReason::kGradient;
    return result;
  }

  std::deque<CurvaturePair> history;
  Eigen::VectorXd x_new(x0.size());
  Eigen::VectorXd g_new(x0.size());

  while (result.iterations < opts.max_iterations) {
    Eigen::VectorXd d;
    double step = 1.0;
    if (history.empty()) {
      d = -g;
      step = std::min(1.0, 1.0 / g.norm());
    } else {
      d = search_direction(history, g);
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      history.clear();
      d = -g;
      step = std::min(1.0, 1.0 / g.norm());
      slope = g.dot(d);
    }

    bool accepted = false;
    double f_new = f;
    for (int tries = 0; tries < kMaxBacktracks; ++tries) {
      x_new = result.x + step * d;
      f_new = fn(x_new, g_new);
      ++result.evaluations;
      if (!std::isfinite(f_new) || !g_new.allFinite())
        throw OptimizationError("minimize: objective became non-finite", result.x);
      if (f_new <= f + kArmijo * step * slope && f_new < f) {
        accepted = true;
        break;
      }
      step *= kBacktrack;
    }
    if (!accepted) {
      result.reason = StopReason::kLineSearch;
      break;
    }

    CurvaturePair pair{x_new - result.x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > std::numeric_limits<double>::epsilon() * pair.y.squaredNorm()) {
      pair.rho = 1.0 / sy;
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > opts.memory) history.pop_front();
    }

    const double change = std::abs(f - f_new) / std::max({std::abs(f), std::abs(f_new), 1e-300});
    result.x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    result.f = f;
    ++result.iterations;

    if (g.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
      result.reason = StopReason::kGradient;
      return result;
    }
    if (change < opts.tolerance) {
      result.reason = StopReason::kTolerance;
      return result;
    }
  }
  if (result.iterations >= opts.max_iterations) result.reason = StopReason::kMaxIterations;
  return result;
}

}  // namespace filterlearn
