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

#include "dqtraj/disorder.hpp"
#include "dqtraj/rng.hpp"
#include "oracles.hpp"

using namespace dqt;

namespace {

Eigen::MatrixXd test_chain() {
  Eigen::MatrixXd t(2, 2);
  t << 0.3, 0.7, 0.6, 0.4;
  return t;
}

}  // namespace

TEST_CASE("stepping round-trips bit-exact") {
  auto model = DisorderModel::iid_haar_shift(3);
  DisorderPoint omega = model->sample_point(99);
  CHECK(omega.position == 0);

  Rng rng(4);
  DisorderPoint cur = omega;
  std::vector<bool> moves;
  for (int i = 0; i < 1000; ++i) {
    const bool fwd = rng.uniform() < 0.5;
    moves.push_back(fwd);
    cur = fwd ? step(cur) : step_back(cur);
  }
  for (int i = 999; i >= 0; --i) cur = moves[i] ? step_back(cur) : step(cur);
  CHECK(cur == omega);
  CHECK(step_back(step(omega)) == omega);
  CHECK(step_n(omega, 7) == step(step_n(omega, 6)));
}

TEST_CASE("iid site values: determinism and shift covariance") {
  auto model = DisorderModel::iid_haar_shift(3);
  const DisorderPoint omega = model->sample_point(1234);

  CHECK(site_value(omega, 0) == site_value(omega, 0));
  CHECK(site_value(omega, 1) == site_value(step(omega), 0));
  // theta^n covariance across positive and negative offsets
  for (std::int64_t n : {1, 5, -3}) {
    for (std::int64_t i : {0, 2, -5}) {
      CHECK(site_value(step_n(omega, n), i) == site_value(omega, i + n));
    }
  }
  // negative indices are well-defined (two-sided sequence)
  CHECK(site_value(omega, -5) == site_value(omega, -5));
  // different seeds decouple
  CHECK(site_value(model->sample_point(1), 0) != site_value(model->sample_point(2), 0));
}

TEST_CASE("point model: theta is the identity") {
  auto model = DisorderModel::point();
  const DisorderPoint omega = model->sample_point(5);
  CHECK(step(omega) == omega);
  CHECK(step_back(omega) == omega);
  CHECK_THROWS_AS(site_value(omega, 0), UnsupportedError);
}

TEST_CASE("rotation model") {
  const double alpha = 0.3819660112501051;
  auto model = DisorderModel::rotation(alpha);
  const DisorderPoint omega = model->sample_point(77);
  const double p0 = rotation_phase(omega);
  CHECK(p0 >= 0.0);
  CHECK(p0 < 1.0);
  const double p1 = rotation_phase(step(omega));
  const double expected = std::fmod(p0 + alpha, 1.0);
  CHECK(std::min(std::abs(p1 - expected), 1.0 - std::abs(p1 - expected)) < 1e-12);
  CHECK(rotation_phase(step_back(step(omega))) == p0);
  CHECK_THROWS_AS(site_value(omega, 0), UnsupportedError);
  CHECK_THROWS_AS(DisorderModel::rotation(1.5), StructureError);
}

TEST_CASE("markov model validation") {
  SUBCASE("non-stochastic matrix rejected") {
    Eigen::MatrixXd t(2, 2);
    t << 0.5, 0.4, 0.6, 0.4;
    CHECK_THROWS_AS(DisorderModel::markov_shift(t, {1, 2}), StructureError);
  }
  SUBCASE("reducible chain rejected") {
    Eigen::MatrixXd t(2, 2);
    t << 1.0, 0.0, 0.0, 1.0;
    CHECK_THROWS_AS(DisorderModel::markov_shift(t, {1, 2}), StructureError);
  }
  SUBCASE("seed count must match state count") {
    CHECK_THROWS_AS(DisorderModel::markov_shift(test_chain(), {1}), StructureError);
  }
}

TEST_CASE("markov model: stationary start and ergodic frequencies") {
  auto model = DisorderModel::markov_shift(test_chain(), {111, 222});
  const Eigen::VectorXd pi = testing::power_iteration_stationary(test_chain());
  CHECK((model->stationary() - pi).cwiseAbs().maxCoeff() < 1e-10);

  SUBCASE("initial state follows the stationary distribution over seeds") {
    const int n = 4000;
    double count0 = 0.0;
    for (int s = 0; s < n; ++s) {
      if (markov_state(model->sample_point(mix64(5, s)), 0) == 0) count0 += 1.0;
    }
    const double freq = count0 / n;
    const double se = std::sqrt(pi(0) * (1.0 - pi(0)) / n);
    CHECK(std::abs(freq - pi(0)) < 3.0 * se);
  }
  SUBCASE("empirical frequency over 1e5 steps matches the stationary vector") {
    const DisorderPoint omega = model->sample_point(4242);
    const int n = 100000;
    double count0 = 0.0;
    for (int i = 0; i < n; ++i) {
      if (markov_state(omega, i) == 0) count0 += 1.0;
    }
    const double freq = count0 / n;
    // The second eigenvalue of this chain is negative, so the iid standard
    // error is conservative.
    const double se = std::sqrt(pi(0) * (1.0 - pi(0)) / n);
    CHECK(std::abs(freq - pi(0)) < 3.0 * se);
  }
  SUBCASE("two-sided indices and payload mapping") {
    const DisorderPoint omega = model->sample_point(9);
    const int s_neg = markov_state(omega, -5);
    CHECK(s_neg >= 0);
    CHECK(s_neg < 2);
    CHECK(markov_state(omega, -5) == s_neg);  // memoized walk is stable
    const std::uint64_t payload = site_value(omega, 3);
    CHECK((payload == 111 || payload == 222));
    CHECK(payload == (markov_state(omega, 3) == 0 ? 111u : 222u));
    CHECK(site_value(step(omega), 2) == site_value(omega, 3));
  }
}

TEST_CASE("sample_point is deterministic in (model, seed)") {
  auto model = DisorderModel::iid_haar_shift(3);
  const auto a = model->sample_point(31337);
  const auto b = model->sample_point(31337);
  CHECK(a == b);
  CHECK(a.position == 0);
}
