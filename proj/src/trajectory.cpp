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

#include "dqtraj/trajectory.hpp"

#include <algorithm>
#include <cmath>

#include "dqtraj/parallel.hpp"

namespace dqt {

namespace {

/// Compensated (Kahan) accumulator; keeps aggregation order-independent
/// reductions reproducible.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

double trace_real(const Matrix& m) { return m.trace().real(); }

/// tr((sigma / q)^m) for unnormalized sigma with mass q.
double moment_of_unnormalized(const Matrix& sigma, double q, int m) {
  if (m == 1) return 1.0;
  Matrix p = sigma / q;
  const Matrix base = p;
  for (int i = 2; i < m; ++i) p = p * base;
  return (p * base).trace().real();
}

void check_pow_budget(int alphabet, int depth, std::uint64_t budget,
                      const char* what) {
  const double count = std::pow(static_cast<double>(alphabet), depth);
  if (count > static_cast<double>(budget)) {
    throw BudgetError(std::string(what) + ": |A|^n = " + std::to_string(count) +
                          " exceeds the branch budget " + std::to_string(budget),
                      static_cast<std::uint64_t>(count));
  }
}

}  // namespace

double OutcomeDistribution::total_probability() const {
  KahanSum s;
  for (const auto& b : branches) s.add(b.probability);
  return s.value();
}

TrajectoryRecord sample_trajectory(const DisorderedEnsemble& e,
                                   const DisorderPoint& omega,
                                   const DensityMatrix& rho0, int n_steps,
                                   Rng& rng) {
  if (rho0.dim() != e.dim()) {
    throw StructureError("sample_trajectory: state/ensemble dimension mismatch");
  }
  if (n_steps < 0) throw StructureError("sample_trajectory: n_steps must be >= 0");
  TrajectoryRecord rec{rho0, omega.master_seed, omega.position, {}, {}, {}};
  rec.outcomes.reserve(static_cast<std::size_t>(n_steps));
  rec.states.reserve(static_cast<std::size_t>(n_steps));
  rec.step_probs.reserve(static_cast<std::size_t>(n_steps));

  DisorderPoint cur = omega;
  DensityMatrix rho = rho0;
  for (int k = 0; k < n_steps; ++k) {
    cur = advance(e, cur);
    const KrausSet ks = e.realize(cur);
    std::vector<double> probs(ks.size());
    double total = 0.0;
    for (std::size_t a = 0; a < ks.size(); ++a) {
      probs[a] = outcome_probability(ks.operators[a], rho);
      if (probs[a] <= kZeroBranchThreshold) probs[a] = 0.0;
      total += probs[a];
    }
    if (total <= kZeroBranchThreshold) {
      throw InternalError("sample_trajectory: all outcome probabilities vanish");
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    int chosen = -1;
    for (std::size_t a = 0; a < ks.size(); ++a) {
      if (probs[a] == 0.0) continue;
      acc += probs[a];
      chosen = static_cast<int>(a);
      if (u < acc) break;
    }
    auto out = apply_measurement(ks.operators[static_cast<std::size_t>(chosen)], rho);
    rho = out.post_state;
    rec.outcomes.push_back(chosen);
    rec.states.push_back(rho);
    rec.step_probs.push_back(out.prob);
  }
  return rec;
}

OutcomeDistribution enumerate_distribution(const DisorderedEnsemble& e,
                                           const DisorderPoint& omega,
                                           const DensityMatrix& rho0, int depth,
                                           std::uint64_t max_branches) {
  if (rho0.dim() != e.dim()) {
    throw StructureError("enumerate_distribution: dimension mismatch");
  }
  if (depth < 0) throw StructureError("enumerate_distribution: depth must be >= 0");
  check_pow_budget(e.alphabet_size(), depth, max_branches, "enumerate_distribution");

  OutcomeDistribution dist;
  dist.depth = depth;
  KahanSum pruned;

  OutcomeWord word;
  word.reserve(static_cast<std::size_t>(depth));
  const std::function<void(const DisorderPoint&, const Matrix&, int)> walk =
      [&](const DisorderPoint& at, const Matrix& sigma, int level) {
        if (level == depth) {
          const double q = trace_real(sigma);
          dist.branches.push_back(
              {word, q, DensityMatrix::from_matrix(sigma / q)});
          return;
        }
        const DisorderPoint next = advance(e, at);
        const KrausSet ks = e.realize(next);
        for (std::size_t a = 0; a < ks.size(); ++a) {
          Matrix child = ks.operators[a] * sigma * ks.operators[a].adjoint();
          const double q = trace_real(child);
          if (q < kZeroBranchThreshold) {
            pruned.add(std::max(q, 0.0));
            continue;
          }
          word.push_back(static_cast<int>(a));
          walk(next, child, level + 1);
          word.pop_back();
        }
      };

  if (rho0.is_zero()) {
    throw StructureError("enumerate_distribution: zero-sentinel initial state");
  }
  walk(omega, rho0.matrix(), 0);
  dist.pruned_mass = pruned.value();
  return dist;
}

MomentEstimate expected_moment(const DisorderedEnsemble& e,
                               const DisorderPoint& omega,
                               const DensityMatrix& rho0, int m, int depth,
                               const ExpectedMomentOptions& opts) {
  if (m < 1) throw StructureError("expected_moment: m must be >= 1");
  if (depth < 0) throw StructureError("expected_moment: depth must be >= 0");
  const double count = std::pow(static_cast<double>(e.alphabet_size()), depth);
  if (count <= static_cast<double>(opts.max_branches)) {
    KahanSum total;
    const std::function<void(const DisorderPoint&, const Matrix&, int)> walk =
        [&](const DisorderPoint& at, const Matrix& sigma, int level) {
          const double q = trace_real(sigma);
          if (q < kZeroBranchThreshold) return;
          if (level == depth) {
            total.add(q * moment_of_unnormalized(sigma, q, m));
            return;
          }
          const DisorderPoint next = advance(e, at);
          const KrausSet ks = e.realize(next);
          for (const auto& v : ks.operators) {
            walk(next, Matrix(v * sigma * v.adjoint()), level + 1);
          }
        };
    walk(omega, rho0.matrix(), 0);
    return {total.value(), 0.0, true};
  }

  // Monte Carlo fallback: fixed per-trajectory streams, compensated mean.
  KahanSum sum, sum_sq;
  for (int j = 0; j < opts.mc_samples; ++j) {
    Rng rng(mix64(opts.mc_seed, j));
    const auto rec = sample_trajectory(e, omega, rho0, depth, rng);
    const double v =
        depth == 0 ? purity_moment(rho0, m) : purity_moment(rec.states.back(), m);
    sum.add(v);
    sum_sq.add(v * v);
  }
  const double n = static_cast<double>(opts.mc_samples);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, sum_sq.value() / n - mean * mean);
  return {mean, std::sqrt(var / n), false};
}

double submartingale_gap(const KrausSet& k, const DensityMatrix& rho, int m) {
  if (rho.is_zero()) return 0.0;
  const double lhs = purity_moment(rho, m);
  KahanSum rhs;
  for (const auto& v : k.operators) {
    const auto out = apply_measurement(v, rho);
    if (out.prob == 0.0) continue;
    rhs.add(out.prob * purity_moment(out.post_state, m));
  }
  return rhs.value() - lhs;
}

double delta_m(const KrausSet& k, const DensityMatrix& rho, int m) {
  if (rho.is_zero()) return 0.0;
  const double base = purity_moment(rho, m);
  KahanSum sum;
  for (const auto& v : k.operators) {
    const auto out = apply_measurement(v, rho);
    if (out.prob == 0.0) continue;
    const double diff = purity_moment(out.post_state, m) - base;
    sum.add(out.prob * diff * diff);
  }
  return sum.value();
}

IncrementSumSeries increment_sum(const DisorderedEnsemble& e,
                                 const DisorderPoint& omega,
                                 const DensityMatrix& rho0, int m, int n_max,
                                 std::uint64_t max_branches) {
  if (n_max < 0) throw StructureError("increment_sum: n_max must be >= 0");
  check_pow_budget(e.alphabet_size(), n_max, max_branches, "increment_sum");

  std::vector<KahanSum> per_depth(static_cast<std::size_t>(n_max));
  const std::function<void(const DisorderPoint&, const Matrix&, int)> walk =
      [&](const DisorderPoint& at, const Matrix& sigma, int level) {
        const double q = trace_real(sigma);
        if (q < kZeroBranchThreshold || level >= n_max) return;
        const DisorderPoint next = advance(e, at);
        const KrausSet ks = e.realize(next);
        const DensityMatrix state = DensityMatrix::from_matrix(sigma / q);
        per_depth[static_cast<std::size_t>(level)].add(q * delta_m(ks, state, m));
        for (const auto& v : ks.operators) {
          walk(next, Matrix(v * sigma * v.adjoint()), level + 1);
        }
      };
  walk(omega, rho0.matrix(), 0);

  IncrementSumSeries out;
  out.per_depth.reserve(per_depth.size());
  out.partial_sums.reserve(per_depth.size());
  KahanSum acc;
  for (const auto& s : per_depth) {
    out.per_depth.push_back(s.value());
    acc.add(s.value());
    out.partial_sums.push_back(acc.value());
  }
  return out;
}

std::vector<OmegaSummary> purification_report(
    const DisorderedEnsemble& e, const std::vector<std::uint64_t>& omega_seeds,
    const InitialStateFn& rho0_of, const PurifyOptions& opts) {
  std::vector<OmegaSummary> results(omega_seeds.size());
  const auto run_one = [&](std::size_t idx) {
    const std::uint64_t seed = omega_seeds[idx];
    const DisorderPoint omega = e.model()->sample_point(seed);
    Rng rho_rng(mix64(opts.traj_seed, static_cast<std::int64_t>(idx), -1));
    const DensityMatrix rho0 = rho0_of(omega, rho_rng);

    OmegaSummary s;
    s.omega_seed = seed;
    const auto n = static_cast<std::size_t>(opts.n_steps) + 1;
    std::vector<KahanSum> m2(n), m2_sq(n), pure(n);
    std::vector<double> finals(static_cast<std::size_t>(opts.n_traj));
    for (int j = 0; j < opts.n_traj; ++j) {
      Rng rng(mix64(opts.traj_seed, static_cast<std::int64_t>(idx), j));
      const auto rec = sample_trajectory(e, omega, rho0, opts.n_steps, rng);
      double last = purity_moment(rho0, 2);
      for (std::size_t k = 0; k < n; ++k) {
        const double v = k == 0 ? last : purity_moment(rec.states[k - 1], 2);
        m2[k].add(v);
        m2_sq[k].add(v * v);
        pure[k].add(v >= 1.0 - kPureTol ? 1.0 : 0.0);
        last = v;
      }
      finals[static_cast<std::size_t>(j)] = last;
    }
    const double nt = static_cast<double>(opts.n_traj);
    for (std::size_t k = 0; k < n; ++k) {
      const double mean = m2[k].value() / nt;
      const double var = std::max(0.0, m2_sq[k].value() / nt - mean * mean);
      s.mean_m2.push_back(mean);
      s.stderr_m2.push_back(std::sqrt(var / nt));
      s.frac_pure.push_back(pure[k].value() / nt);
    }
    s.final_mean_m2 = s.mean_m2.back();
    s.final_frac_pure = s.frac_pure.back();
    std::sort(finals.begin(), finals.end());
    s.final_median_m2 = finals[finals.size() / 2];

    const double count =
        std::pow(static_cast<double>(e.alphabet_size()), opts.n_steps);
    ExpectedMomentOptions mopts;
    mopts.max_branches = opts.max_branches;
    mopts.mc_samples = opts.n_traj;
    mopts.mc_seed = mix64(opts.traj_seed, static_cast<std::int64_t>(idx), 1 << 20);
    s.phi_exact =
        opts.exact_phi && count <= static_cast<double>(opts.max_branches);
    for (int d = 0; d <= opts.n_steps; ++d) {
      if (s.phi_exact) {
        const auto est = expected_moment(e, omega, rho0, 2, d, mopts);
        s.phi.push_back(est.value);
        s.phi_stderr.push_back(est.std_error);
      } else {
        s.phi.push_back(s.mean_m2[static_cast<std::size_t>(d)]);
        s.phi_stderr.push_back(s.stderr_m2[static_cast<std::size_t>(d)]);
      }
    }

    const int inc_depth = std::min(opts.increment_depth, opts.n_steps);
    const double inc_count =
        std::pow(static_cast<double>(e.alphabet_size()), inc_depth);
    if (inc_count <= static_cast<double>(opts.max_branches)) {
      s.increment_sum_m2 =
          increment_sum(e, omega, rho0, 2, inc_depth, opts.max_branches).total();
    }
    results[idx] = std::move(s);
  };
  parallel_for_index(omega_seeds.size(), opts.threads, run_one);
  return results;
}

}  // namespace dqt
