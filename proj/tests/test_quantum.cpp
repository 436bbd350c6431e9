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

#include <doctest.h>

#include "dqtraj/quantum.hpp"
#include "oracles.hpp"

using namespace dqt;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("validate_kraus") {
  SUBCASE("single identity passes with zero deviation") {
    KrausSet k(2, {Matrix::Identity(2, 2)});
    const auto v = validate_kraus(k, 1e-10);
    CHECK(v.pass);
    CHECK(v.max_deviation == 0.0);
  }
  SUBCASE("orthogonal projectors summing to identity pass") {
    KrausSet k(2, {diag2(1, 0), diag2(0, 1)});
    CHECK(validate_kraus(k).pass);
  }
  SUBCASE("lossy set fails with deviation 0.75") {
    KrausSet k(2, {diag2(1, 0), diag2(0, 0.5)});
    const auto v = validate_kraus(k);
    CHECK_FALSE(v.pass);
    CHECK(v.max_deviation == doctest::Approx(0.75).epsilon(1e-12));
  }
  SUBCASE("operator dimension mismatch is a structural error") {
    CHECK_THROWS_AS(KrausSet(2, {Matrix::Identity(2, 2), Matrix::Identity(3, 3)}),
                    StructureError);
  }
}

TEST_CASE("apply_measurement") {
  SUBCASE("identity leaves the state unchanged with probability 1") {
    const auto rho = DensityMatrix::maximally_mixed(2);
    const auto out = apply_measurement(Matrix::Identity(2, 2), rho);
    CHECK(out.prob == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs(out.post_state.matrix() - rho.matrix()) < 1e-14);
  }
  SUBCASE("projector on maximally mixed: (|0><0|, 1/2)") {
    const auto rho = DensityMatrix::maximally_mixed(2);
    const auto out = apply_measurement(diag2(1, 0), rho);
    CHECK(out.prob == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(max_abs(out.post_state.matrix() - diag2(1, 0)) < 1e-12);
  }
  SUBCASE("dead branch returns the zero sentinel with probability exactly 0") {
    Matrix v = Matrix::Zero(2, 2);
    v(0, 1) = 1.0;  // |0><1|
    Vector e0 = Vector::Zero(2);
    e0(0) = 1.0;
    const auto out = apply_measurement(v, DensityMatrix::pure(e0));
    CHECK(out.prob == 0.0);
    CHECK(out.post_state.is_zero());
  }
  SUBCASE("random measurements produce valid states and conserve probability") {
    Rng rng(101);
    for (int i = 0; i < 100; ++i) {
      const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.next_u64() % 3);
      const auto ks = testing::random_kraus(d, 2, rng);
      const auto rho = DensityMatrix::random_mixed(d, rng);
      double total = 0.0;
      for (const auto& v : ks.operators) {
        const auto out = apply_measurement(v, rho);
        total += out.prob;
        if (out.prob > 0.0) {
          CHECK(is_valid_state(out.post_state.matrix()));
        }
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("pure states stay pure on surviving branches") {
    Rng rng(202);
    for (int i = 0; i < 100; ++i) {
      const auto ks = testing::random_kraus(3, 2, rng);
      const auto rho = DensityMatrix::random_pure(3, rng);
      for (const auto& v : ks.operators) {
        const auto out = apply_measurement(v, rho);
        if (out.prob > 0.0) {
          CHECK(purity_moment(out.post_state, 2) == doctest::Approx(1.0).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("purity_moment") {
  SUBCASE("maximally mixed second moment is 1/d") {
    for (Eigen::Index d : {2, 3, 4}) {
      CHECK(purity_moment(DensityMatrix::maximally_mixed(d), 2) ==
            doctest::Approx(1.0 / static_cast<double>(d)).epsilon(1e-12));
    }
  }
  SUBCASE("pure states have all moments 1") {
    Rng rng(7);
    const auto rho = DensityMatrix::random_pure(4, rng);
    for (int m : {2, 3, 5}) {
      CHECK(purity_moment(rho, m) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  SUBCASE("diag(0.7, 0.3) third moment") {
    const auto rho = DensityMatrix::from_matrix(diag2(0.7, 0.3));
    CHECK(purity_moment(rho, 3) == doctest::Approx(0.370).epsilon(1e-12));
  }
  SUBCASE("first moment is exactly 1; zero sentinel gives 0") {
    Rng rng(8);
    CHECK(purity_moment(DensityMatrix::random_mixed(3, rng), 1) == 1.0);
    CHECK(purity_moment(DensityMatrix::zero(3), 2) == 0.0);
  }
}

TEST_CASE("trace_distance") {
  const auto rho = DensityMatrix::from_matrix(diag2(0.6, 0.4));
  const auto rho2 = DensityMatrix::from_matrix(diag2(0.4, 0.6));
  CHECK(trace_distance(rho, rho) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(trace_distance(rho, rho2) == doctest::Approx(0.4).epsilon(1e-12));
  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  CHECK(trace_distance(DensityMatrix::pure(e0), DensityMatrix::pure(e1)) ==
        doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("haar_unitary") {
  SUBCASE("unitarity for d in {2, 3, 4, 8}") {
    Rng rng(11);
    for (Eigen::Index d : {2, 3, 4, 8}) {
      const Matrix u = haar_unitary(d, rng);
      CHECK(deviation_from_identity(u.adjoint() * u) < 1e-12);
    }
  }
  SUBCASE("first-entry second moment matches 1/d (Monte Carlo)") {
    // Oracle: E|U_11|^2 = 1/d, since the squared entries of any column sum
    // to 1 and are exchangeable under Haar measure.
    Rng rng(12);
    const int n = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const Matrix u = haar_unitary(3, rng);
      const double v = std::norm(u(0, 0));
      sum += v;
      sum_sq += v * v;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0 / 3.0) < 3.0 * se);
  }
}

TEST_CASE("state and projection validation") {
  SUBCASE("rejects non-Hermitian, non-PSD, and wrong-trace matrices") {
    Matrix m = diag2(0.5, 0.5);
    m(0, 1) = 0.3;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(m), StructureError);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(diag2(1.5, -0.5)), StructureError);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(diag2(0.6, 0.6)), StructureError);
  }
  SUBCASE("zero matrix is the dead-branch sentinel") {
    const auto z = DensityMatrix::from_matrix(Matrix::Zero(3, 3));
    CHECK(z.is_zero());
  }
  SUBCASE("projection accepts coordinate projectors, rejects non-idempotent") {
    const auto p = Projection::coordinate(3, {0, 2});
    CHECK(p.rank() == 2);
    CHECK(Projection::from_matrix(p.matrix()).rank() == 2);
    CHECK_THROWS_AS(Projection::from_matrix(diag2(0.5, 0.5)), StructureError);
  }
}
