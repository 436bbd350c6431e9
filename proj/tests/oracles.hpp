// Copyright 2026 dqtraj contributors
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

// Test-only oracles, independent of the implementation paths they check.

#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "dqtraj/ensemble.hpp"
#include "dqtraj/quantum.hpp"
#include "dqtraj/trajectory.hpp"

namespace dqt::testing {

/// Random perfect Kraus set from a Haar isometry split into k blocks.
/// Completeness holds by construction: sum_a V_a^dagger V_a = W^dagger W = I.
inline KrausSet random_kraus(Eigen::Index d, int k, Rng& rng) {
  const Matrix u = haar_unitary(d * k, rng);
  const Matrix w = u.leftCols(d);
  std::vector<Matrix> ops;
  ops.reserve(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) ops.push_back(w.middleRows(a * d, d));
  return KrausSet(d, std::move(ops));
}

/// Stationary vector by plain power iteration (independent of the linear
/// solve used by the markov model).
inline Eigen::VectorXd power_iteration_stationary(const Eigen::MatrixXd& t,
                                                  int iters = 20000) {
  Eigen::VectorXd pi = Eigen::VectorXd::Constant(t.rows(), 1.0 / t.rows());
  for (int i = 0; i < iters; ++i) {
    pi = (t.transpose() * pi).eval();
    pi /= pi.sum();
  }
  return pi;
}

/// Central finite difference of the defect along a fixed direction.
template <typename F>
double central_difference(const F& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

/// Conditional second moment of the one-step increment on a given branch,
/// computed from the depth-(n+1) enumeration (an independent route to
/// delta^(m): word operators instead of the stepwise Kraus realization).
inline double conditional_increment_variance(
    const DisorderedEnsemble& e, const OutcomeDistribution& at_depth_n,
    const OutcomeDistribution& at_depth_n1, std::size_t branch_index, int m) {
  const auto& parent = at_depth_n.branches[branch_index];
  const double m_parent = purity_moment(parent.state, m);
  std::map<std::uint64_t, const OutcomeBranch*> children;
  for (const auto& b : at_depth_n1.branches) {
    OutcomeWord prefix(b.word.begin(), b.word.end() - 1);
    if (prefix == parent.word) {
      children[encode_word_index(b.word, e.alphabet_size())] = &b;
    }
  }
  double var = 0.0;
  for (const auto& [idx, child] : children) {
    (void)idx;
    const double p_cond = child->probability / parent.probability;
    const double diff = purity_moment(child->state, m) - m_parent;
    var += p_cond * diff * diff;
  }
  return var;
}

}  // namespace dqt::testing
