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

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dqtraj/common.hpp"

namespace dqt {

enum class DisorderVariant { IidHaarShift, MarkovShift, Rotation, Point };

class DisorderModel;

/// A point omega of the noise space together with the shift index. Stepping
/// is pure index arithmetic, so theta^-1(theta(omega)) round-trips bit-exact.
struct DisorderPoint {
  std::shared_ptr<const DisorderModel> model;
  std::uint64_t master_seed = 0;
  std::int64_t position = 0;

  bool operator==(const DisorderPoint& o) const {
    return model == o.model && master_seed == o.master_seed && position == o.position;
  }
};

/// The driving ergodic system (Omega, P, theta): an invertible shift over
/// seeded, Z-indexed randomness. Four variants; site payloads are
/// deterministic functions of (master seed, absolute index).
class DisorderModel : public std::enable_shared_from_this<DisorderModel> {
 public:
  /// i.i.d. product shift; each site carries an independent payload seed
  /// (used to draw one Haar unitary of the given dimension per site).
  static std::shared_ptr<const DisorderModel> iid_haar_shift(Eigen::Index dim);

  /// Stationary two-sided Markov chain over the rows of an irreducible
  /// row-stochastic matrix; site payload is the per-state seed.
  static std::shared_ptr<const DisorderModel> markov_shift(
      const Eigen::MatrixXd& transition, std::vector<std::uint64_t> state_seeds);

  /// Circle rotation by angle alpha (mod 1). Demonstration model: alpha is a
  /// double, so ergodicity holds only ideally.
  static std::shared_ptr<const DisorderModel> rotation(double alpha);

  /// Single-point space; theta is the identity map.
  static std::shared_ptr<const DisorderModel> point();

  DisorderVariant variant() const { return variant_; }
  std::string variant_name() const;
  /// Site dimension for iid_haar_shift (unitary size).
  Eigen::Index haar_dim() const;
  const Eigen::MatrixXd& transition() const;
  const Eigen::VectorXd& stationary() const;
  double rotation_angle() const;

  DisorderPoint sample_point(std::uint64_t seed) const;

 private:
  DisorderModel() = default;
  friend DisorderPoint step(const DisorderPoint&);
  friend DisorderPoint step_back(const DisorderPoint&);
  friend std::uint64_t site_value(const DisorderPoint&, std::int64_t);
  friend double rotation_phase(const DisorderPoint&);
  friend int markov_state(const DisorderPoint&, std::int64_t);

  int chain_state_at(std::uint64_t seed, std::int64_t index) const;

  DisorderVariant variant_ = DisorderVariant::Point;
  Eigen::Index haar_dim_ = 0;
  Eigen::MatrixXd transition_;
  Eigen::MatrixXd reverse_transition_;
  Eigen::VectorXd stationary_;
  std::vector<std::uint64_t> state_seeds_;
  double alpha_ = 0.0;

  // Lazily grown two-sided chain walks, keyed by master seed. Purely a
  // memoization of a deterministic function of (seed, index).
  struct ChainCache {
    std::vector<int> forward;   // states at indices 0, 1, 2, ...
    std::vector<int> backward;  // states at indices -1, -2, ...
  };
  mutable std::mutex cache_mutex_;
  mutable std::map<std::uint64_t, ChainCache> chain_cache_;
};

/// Applies theta (advances the shift index). Identity for the point model.
DisorderPoint step(const DisorderPoint& omega);
/// Applies theta^-1. step_back(step(omega)) == omega bit-exact.
DisorderPoint step_back(const DisorderPoint& omega);
/// theta^n for any integer n (negative steps back).
DisorderPoint step_n(const DisorderPoint& omega, std::int64_t n);

/// Payload seed of site i relative to the current position. Defined for the
/// iid and markov variants; indices range over all of Z.
std::uint64_t site_value(const DisorderPoint& omega, std::int64_t i);

/// Current phase in [0, 1) for the rotation model.
double rotation_phase(const DisorderPoint& omega);

/// Chain state at relative index i for the markov model.
int markov_state(const DisorderPoint& omega, std::int64_t i);

}  // namespace dqt
