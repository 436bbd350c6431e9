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
#include <vector>

#include "dqtraj/ensemble.hpp"

namespace dqt {

/// Orthonormal d x r frame; parametrizes the rank-r projection F F^dagger.
class Frame {
 public:
  /// Validates F^dagger F = I_r at kStateTol and 2 <= r <= d.
  static Frame from_matrix(const Matrix& columns);
  /// Haar-random frame on the Stiefel manifold.
  static Frame random(Eigen::Index d, Eigen::Index r, Rng& rng);

  Eigen::Index dim() const { return columns_.rows(); }
  Eigen::Index rank() const { return columns_.cols(); }
  const Matrix& columns() const { return columns_; }
  Projection projection() const { return Projection::from_isometry(columns_); }

 private:
  explicit Frame(Matrix c) : columns_(std::move(c)) {}
  Matrix columns_;
};

inline constexpr double kGrayFoundTol = 1e-12;     // defect below this: gray found
inline constexpr double kGrayEvidenceTol = 1e-6;   // defect above this: evidence of none
inline constexpr std::uint64_t kDefaultWordBudget = 1u << 12;

/// Word Gram matrices W_w = V^(N)_w^dagger V^(N)_w for all w in A^N,
/// indexed lexicographically. The inputs of the darkness defect.
std::vector<Matrix> word_grams(const DisorderedEnsemble& e,
                               const DisorderPoint& omega, int N,
                               std::uint64_t max_words = kDefaultWordBudget);

/// Darkness defect D_N(p) = sum_w || p W_w p - lambda_w p ||_F^2 at the
/// least-squares lambda_w = tr(p W_w p) / r, with p = F F^dagger. Zero
/// exactly on N-gray projections.
double defect(const DisorderedEnsemble& e, const DisorderPoint& omega,
              const Frame& f, int N, std::uint64_t max_words = kDefaultWordBudget);

/// Same, over precomputed grams (the search inner loop).
double defect_from_grams(const std::vector<Matrix>& grams, const Matrix& frame);

/// Riemannian gradient of the defect on the Stiefel manifold (Euclidean
/// gradient projected to the tangent space G - F herm(F^dagger G)).
Matrix defect_gradient(const DisorderedEnsemble& e, const DisorderPoint& omega,
                       const Frame& f, int N,
                       std::uint64_t max_words = kDefaultWordBudget);

Matrix defect_gradient_from_grams(const std::vector<Matrix>& grams,
                                  const Matrix& frame);

struct SearchConfig {
  int restarts = 20;
  int max_iters = 2000;
  double grad_tol = 1e-9;
  double found_tol = kGrayFoundTol;
  std::uint64_t seed = 1;
  std::uint64_t max_words = kDefaultWordBudget;
};

/// Result of a restart-based gray-projection search. No emptiness
/// certificate: found_gray = false only means no defect-zero frame was found.
struct DefectReport {
  int N = 1;
  int rank = 2;
  double min_defect = 0.0;
  Matrix best_frame;
  int restarts_run = 0;
  int converged_restarts = 0;
  std::vector<double> per_restart_defects;
  bool found_gray = false;
};

/// Minimizes the defect over rank-r frames with `restarts` independent
/// projected-gradient descents (QR retraction, backtracking line search).
DefectReport search_gray(const DisorderedEnsemble& e, const DisorderPoint& omega,
                         int N, int r, const SearchConfig& config = {});

struct DarkCandidateReport {
  bool is_candidate = false;
  std::vector<double> defects;               // per N = 1..N_max
  std::vector<std::vector<double>> lambdas;  // per N, per word
};

/// Checks the frame's defect for every N <= N_max and reports the lambda
/// tables. Certifies darkness only up to the horizon N_max.
DarkCandidateReport verify_dark_candidate(const DisorderedEnsemble& e,
                                          const DisorderPoint& omega,
                                          const Frame& f, int N_max, double tol,
                                          std::uint64_t max_words = kDefaultWordBudget);

/// The rank-2 dark certificate of the example2 ensemble: the first two
/// columns of the site-1 unitary.
Frame example2_certificate(const DisorderPoint& omega);

struct IsometryProportionality {
  double deviation = 0.0;
  double mu = 0.0;  // least-squares proportionality constant
};

/// How far V_next restricted to ran(V_prev) is from a scalar multiple of an
/// isometry: || Q^dagger V_next^dagger V_next Q - mu I ||_F with Q an
/// orthonormal basis of ran(V_prev).
IsometryProportionality isometry_proportionality(const Matrix& V_next,
                                                 const Matrix& V_prev);

struct EmptyProbabilityEstimate {
  double fraction = 0.0;  // fraction of omegas with min defect above evidence tol
  double ci_low = 0.0;    // 95% Wilson interval
  double ci_high = 0.0;
  int n_omegas = 0;
  std::vector<bool> empty_flags;  // per omega
  // Restart-based search cannot certify emptiness; all consumers must label
  // this estimate heuristic.
  static constexpr const char* kNote =
      "heuristic - restarts-based, no emptiness certificate";
};

/// Fraction of sampled omegas at which no rank in [r_min, r_max] yields a
/// defect below the evidence threshold.
EmptyProbabilityEstimate estimate_empty_probability(
    const DisorderedEnsemble& e, int N, int r_min, int r_max, int n_omegas,
    const SearchConfig& config = {}, double evidence_tol = kGrayEvidenceTol);

}  // namespace dqt
