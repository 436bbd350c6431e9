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

#include "dqtraj/disorder.hpp"

#include <cmath>

#include "dqtraj/rng.hpp"

namespace dqt {

namespace {

constexpr std::uint64_t kInitStream = 0x1d1da7a5eedbeef1ull;
constexpr std::uint64_t kForwardStream = 0xf0f0f0f0f0f0f0f0ull;
constexpr std::uint64_t kBackwardStream = 0xb0b0b0b0b0b0b0b0ull;

double to_unit(std::uint64_t u) {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

int sample_categorical(const Eigen::VectorXd& weights, double u) {
  double acc = 0.0;
  const int n = static_cast<int>(weights.size());
  for (int i = 0; i < n; ++i) {
    acc += weights(i);
    if (u < acc) return i;
  }
  return n - 1;
}

bool strongly_connected(const Eigen::MatrixXd& t) {
  const int n = static_cast<int>(t.rows());
  auto reach = [&](bool transpose) {
    std::vector<bool> seen(n, false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w = 0; w < n; ++w) {
        const double e = transpose ? t(w, v) : t(v, w);
        if (e > 0.0 && !seen[w]) {
          seen[w] = true;
          stack.push_back(w);
        }
      }
    }
    for (bool b : seen)
      if (!b) return false;
    return true;
  };
  return reach(false) && reach(true);
}

// Stationary distribution of a row-stochastic matrix via the linear system
// (T^t - I) pi = 0, sum pi = 1 (one equation replaced by normalization).
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& t) {
  const int n = static_cast<int>(t.rows());
  Eigen::MatrixXd a = t.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(n - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);
  return pi.cwiseMax(0.0) / pi.cwiseMax(0.0).sum();
}

}  // namespace

std::shared_ptr<const DisorderModel> DisorderModel::iid_haar_shift(Eigen::Index dim) {
  if (dim < 1) throw StructureError("iid_haar_shift: dimension must be positive");
  auto m = std::shared_ptr<DisorderModel>(new DisorderModel());
  m->variant_ = DisorderVariant::IidHaarShift;
  m->haar_dim_ = dim;
  return m;
}

std::shared_ptr<const DisorderModel> DisorderModel::markov_shift(
    const Eigen::MatrixXd& transition, std::vector<std::uint64_t> state_seeds) {
  const auto n = transition.rows();
  if (n < 1 || transition.cols() != n) {
    throw StructureError("markov_shift: transition matrix must be square");
  }
  if (static_cast<Eigen::Index>(state_seeds.size()) != n) {
    throw StructureError("markov_shift: need one payload seed per state");
  }
  if (transition.minCoeff() < 0.0 ||
      (transition.rowwise().sum().array() - 1.0).abs().maxCoeff() > 1e-12) {
    throw StructureError("markov_shift: matrix is not row-stochastic within 1e-12");
  }
  if (!strongly_connected(transition)) {
    throw StructureError("markov_shift: chain is not irreducible");
  }
  auto m = std::shared_ptr<DisorderModel>(new DisorderModel());
  m->variant_ = DisorderVariant::MarkovShift;
  m->transition_ = transition;
  m->stationary_ = stationary_of(transition);
  m->state_seeds_ = std::move(state_seeds);
  // Reversed-time kernel: Tr(i,j) = pi_j T(j,i) / pi_i.
  m->reverse_transition_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m->reverse_transition_(i, j) =
          m->stationary_(j) * transition(j, i) / m->stationary_(i);
  return m;
}

std::shared_ptr<const DisorderModel> DisorderModel::rotation(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw StructureError("rotation: angle must lie in (0, 1)");
  }
  auto m = std::shared_ptr<DisorderModel>(new DisorderModel());
  m->variant_ = DisorderVariant::Rotation;
  m->alpha_ = alpha;
  return m;
}

std::shared_ptr<const DisorderModel> DisorderModel::point() {
  auto m = std::shared_ptr<DisorderModel>(new DisorderModel());
  m->variant_ = DisorderVariant::Point;
  return m;
}

std::string DisorderModel::variant_name() const {
  switch (variant_) {
    case DisorderVariant::IidHaarShift: return "iid_haar_shift";
    case DisorderVariant::MarkovShift: return "markov_shift";
    case DisorderVariant::Rotation: return "rotation";
    case DisorderVariant::Point: return "point";
  }
  return "?";
}

Eigen::Index DisorderModel::haar_dim() const {
  if (variant_ != DisorderVariant::IidHaarShift) {
    throw UnsupportedError("haar_dim: not an iid_haar_shift model");
  }
  return haar_dim_;
}

const Eigen::MatrixXd& DisorderModel::transition() const {
  if (variant_ != DisorderVariant::MarkovShift) {
    throw UnsupportedError("transition: not a markov_shift model");
  }
  return transition_;
}

const Eigen::VectorXd& DisorderModel::stationary() const {
  if (variant_ != DisorderVariant::MarkovShift) {
    throw UnsupportedError("stationary: not a markov_shift model");
  }
  return stationary_;
}

double DisorderModel::rotation_angle() const {
  if (variant_ != DisorderVariant::Rotation) {
    throw UnsupportedError("rotation_angle: not a rotation model");
  }
  return alpha_;
}

DisorderPoint DisorderModel::sample_point(std::uint64_t seed) const {
  return DisorderPoint{shared_from_this(), seed, 0};
}

int DisorderModel::chain_state_at(std::uint64_t seed, std::int64_t index) const {
  std::lock_guard<std::mutex> lock(cache_mutex_);
  ChainCache& c = chain_cache_[seed];
  if (c.forward.empty()) {
    const double u0 = to_unit(mix64(seed ^ kInitStream, 0));
    c.forward.push_back(sample_categorical(stationary_, u0));
  }
  if (index >= 0) {
    while (static_cast<std::int64_t>(c.forward.size()) <= index) {
      const auto k = static_cast<std::int64_t>(c.forward.size()) - 1;
      const double u = to_unit(mix64(seed ^ kForwardStream, k));
      c.forward.push_back(sample_categorical(transition_.row(c.forward.back()), u));
    }
    return c.forward[static_cast<std::size_t>(index)];
  }
  while (static_cast<std::int64_t>(c.backward.size()) < -index) {
    const auto k = -static_cast<std::int64_t>(c.backward.size()) - 1;
    const int from = c.backward.empty() ? c.forward.front() : c.backward.back();
    const double u = to_unit(mix64(seed ^ kBackwardStream, k));
    c.backward.push_back(sample_categorical(reverse_transition_.row(from), u));
  }
  return c.backward[static_cast<std::size_t>(-index - 1)];
}

DisorderPoint step(const DisorderPoint& omega) {
  if (!omega.model) throw StructureError("step: point has no model");
  if (omega.model->variant_ == DisorderVariant::Point) return omega;
  DisorderPoint next = omega;
  ++next.position;
  return next;
}

DisorderPoint step_back(const DisorderPoint& omega) {
  if (!omega.model) throw StructureError("step_back: point has no model");
  if (omega.model->variant_ == DisorderVariant::Point) return omega;
  DisorderPoint prev = omega;
  --prev.position;
  return prev;
}

DisorderPoint step_n(const DisorderPoint& omega, std::int64_t n) {
  if (!omega.model) throw StructureError("step_n: point has no model");
  if (omega.model->variant() == DisorderVariant::Point) return omega;
  DisorderPoint p = omega;
  p.position += n;
  return p;
}

std::uint64_t site_value(const DisorderPoint& omega, std::int64_t i) {
  if (!omega.model) throw StructureError("site_value: point has no model");
  const auto& m = *omega.model;
  switch (m.variant_) {
    case DisorderVariant::IidHaarShift:
      return mix64(omega.master_seed, omega.position + i);
    case DisorderVariant::MarkovShift:
      return m.state_seeds_[static_cast<std::size_t>(
          m.chain_state_at(omega.master_seed, omega.position + i))];
    default:
      throw UnsupportedError("site_value: " + m.variant_name() +
                             " model has no site structure");
  }
}

double rotation_phase(const DisorderPoint& omega) {
  if (!omega.model || omega.model->variant_ != DisorderVariant::Rotation) {
    throw UnsupportedError("rotation_phase: not a rotation model");
  }
  const double phase0 = to_unit(mix64(omega.master_seed ^ kInitStream, 0));
  const double raw = phase0 + static_cast<double>(omega.position) * omega.model->alpha_;
  return raw - std::floor(raw);
}

int markov_state(const DisorderPoint& omega, std::int64_t i) {
  if (!omega.model || omega.model->variant_ != DisorderVariant::MarkovShift) {
    throw UnsupportedError("markov_state: not a markov_shift model");
  }
  return omega.model->chain_state_at(omega.master_seed, omega.position + i);
}

}  // namespace dqt
