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

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dqtraj/ensemble.hpp"

namespace dqt {

/// One sampled trajectory: outcomes, per-step Born probabilities, and the
/// state path (states[k] is the state after outcome k+1).
struct TrajectoryRecord {
  DensityMatrix initial_state;
  std::uint64_t omega_seed = 0;
  std::int64_t omega_position = 0;
  OutcomeWord outcomes;
  std::vector<DensityMatrix> states;
  std::vector<double> step_probs;
};

struct OutcomeBranch {
  OutcomeWord word;
  double probability;
  DensityMatrix state;
};

/// Exact depth-n outcome tree. Branch probabilities are the cylinder weights
/// tr(V^(n)_w rho V^(n)_w^dagger); branches below the zero threshold are
/// pruned and their mass accounted in pruned_mass.
struct OutcomeDistribution {
  int depth = 0;
  std::vector<OutcomeBranch> branches;
  double pruned_mass = 0.0;

  double total_probability() const;
};

/// Moment sequence M^(m,0..n) along one trajectory or in expectation.
struct MomentSeries {
  int m = 2;
  std::vector<double> values;
};

struct MomentEstimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 when exact
  bool exact = true;
};

inline constexpr std::uint64_t kDefaultBranchBudget = 1u << 20;

/// Samples one trajectory of n_steps measurements. Outcome k is drawn with
/// the Born weights of the Kraus set at theta^k(omega). Deterministic in
/// (rng seed, omega, rho0).
TrajectoryRecord sample_trajectory(const DisorderedEnsemble& e,
                                   const DisorderPoint& omega,
                                   const DensityMatrix& rho0, int n_steps,
                                   Rng& rng);

/// Exact enumeration of the depth-n outcome distribution.
OutcomeDistribution enumerate_distribution(
    const DisorderedEnsemble& e, const DisorderPoint& omega,
    const DensityMatrix& rho0, int depth,
    std::uint64_t max_branches = kDefaultBranchBudget);

struct ExpectedMomentOptions {
  std::uint64_t max_branches = kDefaultBranchBudget;
  int mc_samples = 4096;      // used when enumeration exceeds the budget
  std::uint64_t mc_seed = 1;  // stream for the Monte Carlo fallback
};

/// E[M^(m,n)] under the quantum probability at omega (the Phi functional for
/// m = 2). Exact branch-weighted sum when affordable, otherwise Monte Carlo
/// with a standard-error report.
MomentEstimate expected_moment(const DisorderedEnsemble& e,
                               const DisorderPoint& omega,
                               const DensityMatrix& rho0, int m, int depth,
                               const ExpectedMomentOptions& opts = {});

/// RHS - LHS of the moment inequality
/// tr(rho^m) <= sum_a tr(V_a rho V_a^dagger) tr((V_a . rho)^m).
/// Nonnegative up to rounding for every perfect Kraus set.
double submartingale_gap(const KrausSet& k, const DensityMatrix& rho, int m);

/// delta^(m): the Born-weighted squared change of the m-th moment under one
/// measurement; equals the conditional second moment of the submartingale
/// increment.
double delta_m(const KrausSet& k, const DensityMatrix& rho, int m);

struct IncrementSumSeries {
  std::vector<double> per_depth;     // E[delta^(m) at depth n], n = 0..n_max-1
  std::vector<double> partial_sums;  // cumulative; bounded by 1
  double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

/// Partial sums sum_{n<n_max} E[delta^(m)(rho^(n))] by exact enumeration.
IncrementSumSeries increment_sum(const DisorderedEnsemble& e,
                                 const DisorderPoint& omega,
                                 const DensityMatrix& rho0, int m, int n_max,
                                 std::uint64_t max_branches = kDefaultBranchBudget);

/// Initial state chosen per disorder point (policy hook for reports).
using InitialStateFn =
    std::function<DensityMatrix(const DisorderPoint&, Rng&)>;

struct PurifyOptions {
  int n_steps = 20;
  int n_traj = 256;
  std::uint64_t traj_seed = 1;
  std::uint64_t max_branches = kDefaultBranchBudget;
  bool exact_phi = true;  // compute the Phi curve by enumeration if affordable
  int increment_depth = 8;
  int threads = 1;
};

/// Per-omega purification summary.
struct OmegaSummary {
  std::uint64_t omega_seed = 0;
  std::vector<double> mean_m2;     // sampled mean M^(2,n), n = 0..n_steps
  std::vector<double> stderr_m2;
  std::vector<double> frac_pure;   // fraction with M^(2,n) >= 1 - kPureTol
  std::vector<double> phi;         // expected M^(2,n) (exact when affordable)
  std::vector<double> phi_stderr;  // 0 where exact
  bool phi_exact = true;
  double final_mean_m2 = 0.0;
  double final_median_m2 = 0.0;
  double final_frac_pure = 0.0;
  double increment_sum_m2 = 0.0;   // partial sum of E[delta^(2)]
};

/// Samples n_traj trajectories at each omega seed and aggregates the
/// purification diagnostics. Results are bit-reproducible for fixed seeds
/// regardless of thread count.
std::vector<OmegaSummary> purification_report(
    const DisorderedEnsemble& e, const std::vector<std::uint64_t>& omega_seeds,
    const InitialStateFn& rho0_of, const PurifyOptions& opts = {});

}  // namespace dqt
