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

#include <utility>
#include <vector>

#include "dqtraj/common.hpp"
#include "dqtraj/rng.hpp"

namespace dqt {

class DensityMatrix;
struct MeasurementOutcome;
MeasurementOutcome apply_measurement(const Matrix& V, const DensityMatrix& rho);

/// d x d Hermitian PSD unit-trace state, or the exact-zero matrix used as
/// the dead-branch sentinel.
class DensityMatrix {
 public:
  /// Validates Hermiticity, positivity, and unit trace (all at kStateTol),
  /// then stores the symmetrized matrix. The zero matrix is accepted as the
  /// dead-branch sentinel.
  static DensityMatrix from_matrix(const Matrix& m);

  static DensityMatrix maximally_mixed(Eigen::Index d);
  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix zero(Eigen::Index d);

  /// Random full-rank state: normalized Wishart G G^dagger / tr.
  static DensityMatrix random_mixed(Eigen::Index d, Rng& rng);
  static DensityMatrix random_pure(Eigen::Index d, Rng& rng);

  Eigen::Index dim() const { return m_.rows(); }
  bool is_zero() const { return zero_; }
  const Matrix& matrix() const { return m_; }

 private:
  DensityMatrix(Matrix m, bool zero) : m_(std::move(m)), zero_(zero) {}
  // Trusted path for post-measurement states (already PSD by construction).
  friend MeasurementOutcome apply_measurement(const Matrix&, const DensityMatrix&);
  Matrix m_;
  bool zero_;
};

/// Rank-r orthogonal projection.
class Projection {
 public:
  /// Validates p = p^dagger, p^2 = p (at kStateTol) and integer trace.
  static Projection from_matrix(const Matrix& m);
  /// Projector onto the span of the given orthonormal columns.
  static Projection from_isometry(const Matrix& frame);
  /// Coordinate projector onto the listed basis indices.
  static Projection coordinate(Eigen::Index d, const std::vector<Eigen::Index>& indices);

  Eigen::Index dim() const { return m_.rows(); }
  Eigen::Index rank() const { return rank_; }
  const Matrix& matrix() const { return m_; }

 private:
  Projection(Matrix m, Eigen::Index rank) : m_(std::move(m)), rank_(rank) {}
  Matrix m_;
  Eigen::Index rank_;
};

/// One realization {V_a} of a perfect Kraus measurement.
struct KrausSet {
  KrausSet(Eigen::Index dim, std::vector<Matrix> operators);

  Eigen::Index dim;
  std::vector<Matrix> operators;

  std::size_t size() const { return operators.size(); }
};

struct KrausValidation {
  bool pass;
  double max_deviation;
};

/// Checks sum_a V_a^dagger V_a = I to the given tolerance.
KrausValidation validate_kraus(const KrausSet& k, double tol = kStateTol);

/// Outcome of one measurement: the renormalized post-state and its Born
/// probability. Dead branches give (zero sentinel, 0).
struct MeasurementOutcome {
  DensityMatrix post_state;
  double prob;
};

/// rho -> (V rho V^dagger / p, p) with p = tr(V rho V^dagger); below the
/// zero-branch threshold the probability is exactly 0 and the state is the
/// zero sentinel.
MeasurementOutcome apply_measurement(const Matrix& V, const DensityMatrix& rho);

/// Born probability tr(V rho V^dagger) alone, clamped to [0, 1].
double outcome_probability(const Matrix& V, const DensityMatrix& rho);

/// tr(rho^m) by repeated products. Returns exactly 1 for m = 1 and 0 for the
/// zero sentinel.
double purity_moment(const DensityMatrix& rho, int m);

/// Trace norm of rho - rho' (sum of absolute eigenvalues of the Hermitian
/// difference).
double trace_distance(const DensityMatrix& rho, const DensityMatrix& rho_prime);

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal
/// phase fix.
Matrix haar_unitary(Eigen::Index d, Rng& rng);

/// d x r matrix with orthonormal columns, Haar-distributed on the Stiefel
/// manifold (first r columns of a Haar unitary in distribution).
Matrix haar_frame(Eigen::Index d, Eigen::Index r, Rng& rng);

/// True if m is Hermitian PSD with unit trace at the given tolerance.
bool is_valid_state(const Matrix& m, double tol = kStateTol);

}  // namespace dqt
