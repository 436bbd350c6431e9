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

#include <cmath>

#include "dqtraj/ensemble.hpp"
#include "dqtraj/trajectory.hpp"
#include "oracles.hpp"

using namespace dqt;

namespace {

Matrix word_completeness_sum(const DisorderedEnsemble& e, const DisorderPoint& w,
                             int n) {
  Matrix sum = Matrix::Zero(e.dim(), e.dim());
  const auto words = static_cast<std::uint64_t>(
      std::pow(static_cast<double>(e.alphabet_size()), n));
  for (std::uint64_t i = 0; i < words; ++i) {
    const Matrix v = word_operator(e, w, decode_word_index(i, e.alphabet_size(), n));
    sum += v.adjoint() * v;
  }
  return sum;
}

}  // namespace

TEST_CASE("example1 structure") {
  const auto e = DisorderedEnsemble::example1();
  const auto omega = e.model()->sample_point(3);
  const KrausSet k = e.realize(omega);
  REQUIRE(k.size() == 2);
  // V_a is a rank-2 projector, V_b rank 1
  CHECK(max_abs(k.operators[0] * k.operators[0] - k.operators[0]) < 1e-12);
  CHECK(k.operators[0].trace().real() == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(k.operators[1].trace().real() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(validate_kraus(k).pass);

  // realize is a pure function of (ensemble, omega)
  const KrausSet k2 = e.realize(omega);
  CHECK(max_abs(k.operators[0] - k2.operators[0]) == 0.0);
  CHECK(max_abs(k.operators[1] - k2.operators[1]) == 0.0);
}

TEST_CASE("example2 intertwining relations") {
  const auto e = DisorderedEnsemble::example2();
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto omega = e.model()->sample_point(seed);
    const KrausSet at = e.realize(omega);
    const KrausSet next = e.realize(step(omega));
    CHECK(max_abs(next.operators[0] * at.operators[1]) < 1e-12);
    CHECK(max_abs(next.operators[1] * at.operators[0]) < 1e-12);
  }
}

TEST_CASE("example3: operators sum to the identity") {
  const auto e = DisorderedEnsemble::example3();
  for (std::uint64_t seed : {5u, 6u}) {
    const KrausSet k = e.realize(e.model()->sample_point(seed));
    CHECK(deviation_from_identity(k.operators[0] + k.operators[1]) < 1e-12);
  }
}

TEST_CASE("example3_general partition validation") {
  using P = std::vector<std::vector<Eigen::Index>>;
  CHECK_THROWS_AS(DisorderedEnsemble::example3_general(4, P{{0, 1}, {1, 2, 3}}),
                  StructureError);
  CHECK_THROWS_AS(DisorderedEnsemble::example3_general(4, P{{0, 1}}), StructureError);
  CHECK_THROWS_AS(DisorderedEnsemble::example3_general(4, P{{0, 1}, {2, 7}}),
                  StructureError);
  CHECK_THROWS_AS(DisorderedEnsemble::example3_general(4, P{}), StructureError);
  const auto e = DisorderedEnsemble::example3_general(5, P{{0, 4}, {1, 2}, {3}});
  CHECK(e.alphabet_size() == 3);
  CHECK(validate_kraus(e.realize(e.model()->sample_point(1))).pass);
}

TEST_CASE("point disorder wraps a fixed Kraus set") {
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  const auto e = DisorderedEnsemble::point_disorder(KrausSet(2, {p0, p1}));
  const auto w = e.model()->sample_point(1);
  CHECK(max_abs(e.realize(w).operators[0] - p0) == 0.0);
  CHECK(max_abs(e.realize(step(w)).operators[0] - p0) == 0.0);

  // incomplete literal sets surface at realize() with the deviation
  Matrix bad = Matrix::Zero(2, 2);
  bad(1, 1) = 0.5;
  const auto e_bad = DisorderedEnsemble::point_disorder(KrausSet(2, {p0, bad}));
  CHECK_THROWS_AS(e_bad.realize(w), EnsembleInvalidError);
  CHECK(validate_kraus(e_bad.realize_unchecked(w)).max_deviation ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("rotation_qubit ensemble is complete at every phase") {
  const auto e = DisorderedEnsemble::rotation_qubit(0.3819660112501051);
  DisorderPoint w = e.model()->sample_point(8);
  for (int i = 0; i < 5; ++i) {
    CHECK(validate_kraus(e.realize(w)).pass);
    w = step(w);
  }
}

TEST_CASE("word_operator convention: first factor at theta(omega)") {
  const auto e = DisorderedEnsemble::example1();
  const auto omega = e.model()->sample_point(21);

  // n = 1
  CHECK(max_abs(word_operator(e, omega, {0}) -
                e.realize(step(omega)).operators[0]) == 0.0);
  // n = 2: V_{a2; theta^2} V_{a1; theta}
  const Matrix manual = e.realize(step_n(omega, 2)).operators[1] *
                        e.realize(step(omega)).operators[0];
  CHECK(max_abs(word_operator(e, omega, {0, 1}) - manual) < 1e-14);
}

TEST_CASE("word completeness for the built-in ensembles") {
  for (auto e : {DisorderedEnsemble::example1(), DisorderedEnsemble::example2(),
                 DisorderedEnsemble::example3()}) {
    const auto omega = e.model()->sample_point(33);
    for (int n = 1; n <= 4; ++n) {
      CHECK(deviation_from_identity(word_completeness_sum(e, omega, n)) <
            n * 1e-9);
    }
  }
}

TEST_CASE("coarse_grain") {
  const auto e = DisorderedEnsemble::example1();
  SUBCASE("N = 1 returns an equivalent ensemble") {
    const auto g = coarse_grain(e, 1);
    const auto w = e.model()->sample_point(2);
    CHECK(max_abs(word_operator(g, w, {1}) - word_operator(e, w, {1})) == 0.0);
  }
  SUBCASE("k coarse steps reproduce length-kN base words entrywise") {
    for (int N : {2, 3}) {
      const auto g = coarse_grain(e, N);
      CHECK(g.alphabet_size() == 1 << N);
      CHECK(g.steps_per_measurement() == N);
      const auto w = e.model()->sample_point(13);
      Rng rng(55);
      for (int trial = 0; trial < 4; ++trial) {
        const int k = 1 + static_cast<int>(rng.next_u64() % 2);
        OutcomeWord base_word;
        OutcomeWord coarse_word;
        for (int j = 0; j < k; ++j) {
          OutcomeWord block;
          for (int i = 0; i < N; ++i) {
            block.push_back(static_cast<int>(rng.next_u64() % 2));
          }
          base_word.insert(base_word.end(), block.begin(), block.end());
          coarse_word.push_back(static_cast<int>(encode_word_index(block, 2)));
        }
        CHECK(max_abs(word_operator(g, w, coarse_word) -
                      word_operator(e, w, base_word)) < 1e-10);
      }
    }
  }
  SUBCASE("coarse labels concatenate base labels lexicographically") {
    const auto g = coarse_grain(e, 2);
    CHECK(g.alphabet() == std::vector<std::string>{"aa", "ab", "ba", "bb"});
  }
  SUBCASE("moment series match between base and grained ensembles") {
    const auto g = coarse_grain(e, 2);
    const auto w = e.model()->sample_point(14);
    const auto rho0 = DensityMatrix::maximally_mixed(3);
    for (int n : {1, 2, 3}) {
      const double base = expected_moment(e, w, rho0, 2, 2 * n).value;
      const double grained = expected_moment(g, w, rho0, 2, n).value;
      CHECK(std::abs(base - grained) < 1e-10);
    }
  }
  SUBCASE("alphabet blow-up hits the budget") {
    CHECK_THROWS_AS(coarse_grain(e, 30), BudgetError);
  }
}

TEST_CASE("word index encode/decode round-trip") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int alphabet = 2 + static_cast<int>(rng.next_u64() % 3);
    const int len = 1 + static_cast<int>(rng.next_u64() % 5);
    OutcomeWord w;
    for (int i = 0; i < len; ++i) {
      w.push_back(static_cast<int>(rng.next_u64() % alphabet));
    }
    CHECK(decode_word_index(encode_word_index(w, alphabet), alphabet, len) == w);
  }
}

TEST_CASE("stationarity in distribution across the shift (smoke)") {
  const auto e = DisorderedEnsemble::example1();
  const auto rho = DensityMatrix::maximally_mixed(3);
  const int n = 1000;
  double diff_sum = 0.0, diff_sq = 0.0;
  for (int s = 0; s < n; ++s) {
    const auto omega = e.model()->sample_point(mix64(91, s));
    const double at = apply_measurement(e.realize(omega).operators[1], rho).prob;
    const double shifted =
        apply_measurement(e.realize(step(omega)).operators[1], rho).prob;
    diff_sum += at - shifted;
    diff_sq += (at - shifted) * (at - shifted);
  }
  const double mean = diff_sum / n;
  const double se = std::sqrt(std::max(1e-30, (diff_sq / n - mean * mean) / n));
  CHECK(std::abs(mean) < 3.0 * se);
}

TEST_CASE("ensembles over a markov shift realize valid Kraus sets") {
  Eigen::MatrixXd t(2, 2);
  t << 0.3, 0.7, 0.6, 0.4;
  const auto e = DisorderedEnsemble::example3(DisorderModel::markov_shift(t, {7, 8}));
  DisorderPoint w = e.model()->sample_point(12);
  for (int i = 0; i < 6; ++i) {
    CHECK(validate_kraus(e.realize(w)).pass);
    w = step(w);
  }
  CHECK_THROWS_AS(DisorderedEnsemble::example1(DisorderModel::point()),
                  UnsupportedError);
}
