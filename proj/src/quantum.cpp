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

#include "dqtraj/quantum.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>

namespace dqt {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw StructureError(std::string(what) + ": expected a square matrix, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) {
    throw StructureError(std::string(what) + ": matrix has NaN/Inf entries");
  }
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

bool is_valid_state(const Matrix& m, double tol) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  if (max_abs(m - m.adjoint()) > tol) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m),
                                           Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) return false;
  return std::abs(m.trace().real() - 1.0) <= tol && std::abs(m.trace().imag()) <= tol;
}

DensityMatrix DensityMatrix::from_matrix(const Matrix& m) {
  require_square(m, "DensityMatrix");
  require_finite(m, "DensityMatrix");
  if (max_abs(m) == 0.0) return zero(m.rows());
  if (max_abs(m - m.adjoint()) > kStateTol) {
    throw StructureError("DensityMatrix: not Hermitian within tolerance");
  }
  Matrix h = symmetrize(m);
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStateTol) {
    throw StructureError("DensityMatrix: not positive semi-definite");
  }
  if (std::abs(h.trace().real() - 1.0) > kStateTol) {
    throw StructureError("DensityMatrix: trace != 1");
  }
  return DensityMatrix(std::move(h), false);
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index d) {
  if (d < 1) throw StructureError("DensityMatrix: dimension must be positive");
  return DensityMatrix(Matrix::Identity(d, d) / static_cast<double>(d), false);
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n = psi.norm();
  if (n <= 0.0 || psi.size() < 1) {
    throw StructureError("DensityMatrix::pure: zero vector");
  }
  Vector u = psi / n;
  return DensityMatrix(u * u.adjoint(), false);
}

DensityMatrix DensityMatrix::zero(Eigen::Index d) {
  if (d < 1) throw StructureError("DensityMatrix: dimension must be positive");
  return DensityMatrix(Matrix::Zero(d, d), true);
}

DensityMatrix DensityMatrix::random_mixed(Eigen::Index d, Rng& rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  return DensityMatrix(symmetrize(w), false);
}

DensityMatrix DensityMatrix::random_pure(Eigen::Index d, Rng& rng) {
  Vector psi(d);
  for (Eigen::Index i = 0; i < d; ++i) psi(i) = rng.complex_normal();
  return pure(psi);
}

Projection Projection::from_matrix(const Matrix& m) {
  require_square(m, "Projection");
  require_finite(m, "Projection");
  if (max_abs(m - m.adjoint()) > kStateTol) {
    throw StructureError("Projection: not Hermitian within tolerance");
  }
  if (max_abs(m * m - m) > kStateTol) {
    throw StructureError("Projection: not idempotent within tolerance");
  }
  const double tr = m.trace().real();
  const auto r = static_cast<Eigen::Index>(std::llround(tr));
  if (std::abs(tr - static_cast<double>(r)) > 1e-8 || r < 1 || r > m.rows()) {
    throw StructureError("Projection: trace is not an integer rank in [1, d]");
  }
  return Projection(symmetrize(m), r);
}

Projection Projection::from_isometry(const Matrix& frame) {
  if (frame.rows() < frame.cols() || frame.cols() < 1) {
    throw StructureError("Projection::from_isometry: need d >= r >= 1");
  }
  if (deviation_from_identity(frame.adjoint() * frame) > kStateTol) {
    throw StructureError("Projection::from_isometry: columns not orthonormal");
  }
  return Projection(frame * frame.adjoint(), frame.cols());
}

Projection Projection::coordinate(Eigen::Index d, const std::vector<Eigen::Index>& indices) {
  Matrix p = Matrix::Zero(d, d);
  for (auto i : indices) {
    if (i < 0 || i >= d) throw StructureError("Projection::coordinate: index out of range");
    if (p(i, i) != 0.0) throw StructureError("Projection::coordinate: repeated index");
    p(i, i) = 1.0;
  }
  if (indices.empty()) throw StructureError("Projection::coordinate: empty index set");
  return Projection(std::move(p), static_cast<Eigen::Index>(indices.size()));
}

KrausSet::KrausSet(Eigen::Index d, std::vector<Matrix> ops)
    : dim(d), operators(std::move(ops)) {
  if (dim < 1) throw StructureError("KrausSet: dimension must be positive");
  if (operators.empty()) throw StructureError("KrausSet: needs at least one operator");
  for (const auto& v : operators) {
    if (v.rows() != dim || v.cols() != dim) {
      throw StructureError("KrausSet: operator dimension mismatch");
    }
    require_finite(v, "KrausSet");
  }
}

KrausValidation validate_kraus(const KrausSet& k, double tol) {
  Matrix sum = Matrix::Zero(k.dim, k.dim);
  for (const auto& v : k.operators) sum += v.adjoint() * v;
  const double dev = deviation_from_identity(sum);
  return {dev <= tol, dev};
}

double outcome_probability(const Matrix& V, const DensityMatrix& rho) {
  if (V.rows() != rho.dim() || V.cols() != rho.dim()) {
    throw StructureError("apply_measurement: operator/state dimension mismatch");
  }
  if (rho.is_zero()) return 0.0;
  // tr(V rho V^dagger) without forming the product matrix.
  const double p = (V * rho.matrix()).cwiseProduct(V.conjugate()).sum().real();
  if (p < -1e-12 || p > 1.0 + 1e-12) {
    throw InternalError("apply_measurement: Born probability outside [0,1]: " +
                        std::to_string(p));
  }
  return std::min(std::max(p, 0.0), 1.0);
}

MeasurementOutcome apply_measurement(const Matrix& V, const DensityMatrix& rho) {
  const double p = outcome_probability(V, rho);
  if (p <= kZeroBranchThreshold) {
    return {DensityMatrix::zero(rho.dim()), 0.0};
  }
  Matrix post = (V * rho.matrix() * V.adjoint()) / p;
  post = 0.5 * (post + post.adjoint());  // bounds Hermiticity drift over long runs
  return {DensityMatrix(std::move(post), false), p};
}

double purity_moment(const DensityMatrix& rho, int m) {
  if (m < 1) throw StructureError("purity_moment: m must be >= 1");
  if (rho.is_zero()) return 0.0;
  if (m == 1) return 1.0;
  Matrix p = rho.matrix();
  for (int i = 2; i < m; ++i) p = p * rho.matrix();
  return (p * rho.matrix()).trace().real();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& rho_prime) {
  if (rho.dim() != rho_prime.dim()) {
    throw StructureError("trace_distance: dimension mismatch");
  }
  // The difference is Hermitian, so the trace norm is the absolute
  // eigenvalue sum; no SVD needed.
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix() - rho_prime.matrix(),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

Matrix haar_unitary(Eigen::Index d, Rng& rng) {
  if (d < 1) throw StructureError("haar_unitary: dimension must be positive");
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = rng.complex_normal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, d);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Plain QR is not Haar-distributed: fix the phases so R has a positive
  // real diagonal.
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0.0) ? std::conj(rjj) / a : Complex(1.0, 0.0);
  }
  return q;
}

Matrix haar_frame(Eigen::Index d, Eigen::Index r, Rng& rng) {
  if (r < 1 || r > d) throw StructureError("haar_frame: need 1 <= r <= d");
  return haar_unitary(d, rng).leftCols(r);
}

}  // namespace dqt
