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

#include <memory>
#include <string>
#include <vector>

#include "dqtraj/common.hpp"
#include "dqtraj/disorder.hpp"
#include "dqtraj/quantum.hpp"

namespace dqt {

/// A finite outcome sequence, stored as indices into the alphabet.
using OutcomeWord = std::vector<int>;

/// Raised when a realized Kraus set fails the completeness check.
class EnsembleInvalidError : public Error {
 public:
  explicit EnsembleInvalidError(const std::string& what) : Error(what) {}
};

/// A disordered perfect Kraus measurement: a deterministic map from disorder
/// points to validated Kraus sets, advanced in time by the model's shift.
class DisorderedEnsemble {
 public:
  Eigen::Index dim() const;
  const std::vector<std::string>& alphabet() const;
  int alphabet_size() const { return static_cast<int>(alphabet().size()); }
  const std::string& name() const;
  /// Base shift steps consumed per measurement (N for N-coarse-grained
  /// ensembles, 1 otherwise).
  int steps_per_measurement() const;
  std::shared_ptr<const DisorderModel> model() const;

  /// The Kraus set at omega, completeness-checked at kStateTol.
  KrausSet realize(const DisorderPoint& omega) const;
  /// Same without the completeness check (validation tooling).
  KrausSet realize_unchecked(const DisorderPoint& omega) const;
  /// Single operator V_a at omega, composed on demand (no full-set check).
  Matrix realize_operator(const DisorderPoint& omega, int outcome) const;

  /// d=3, A={a,b}: rank-2 and rank-1 column projectors of the site-0 Haar
  /// unitary. Purifies eventually. A site-structured model (iid or markov)
  /// may be supplied; the default is the iid Haar shift.
  static DisorderedEnsemble example1(
      std::shared_ptr<const DisorderModel> model = nullptr);
  /// d=3, A={a,b}: bras from site-0 columns, kets from site-1 columns. Has a
  /// rank-2 dark projection at every omega.
  static DisorderedEnsemble example2(
      std::shared_ptr<const DisorderModel> model = nullptr);
  /// d=4, A={a,b}: two rank-2 column-span projectors. Purifies without
  /// eventual purification.
  static DisorderedEnsemble example3(
      std::shared_ptr<const DisorderModel> model = nullptr);
  /// Projectors onto spans of the given groups of site-0 unitary columns.
  /// The groups must partition {0, ..., d-1}. No purification guarantee is
  /// made for arbitrary partitions.
  static DisorderedEnsemble example3_general(
      Eigen::Index d, const std::vector<std::vector<Eigen::Index>>& partition,
      std::shared_ptr<const DisorderModel> model = nullptr);
  /// Fixed Kraus set at every omega (theta is the identity).
  static DisorderedEnsemble point_disorder(KrausSet k,
                                           std::vector<std::string> labels = {});
  /// Qubit measurement in a basis rotated by the circle-rotation phase.
  /// Demonstration ensemble for the rotation model.
  static DisorderedEnsemble rotation_qubit(double alpha);

  struct Impl;
  explicit DisorderedEnsemble(std::shared_ptr<const Impl> impl)
      : impl_(std::move(impl)) {}
  const Impl& impl() const { return *impl_; }

 private:
  std::shared_ptr<const Impl> impl_;
};

/// theta^steps_per_measurement: the point supplying the next measurement.
DisorderPoint advance(const DisorderedEnsemble& e, const DisorderPoint& omega);

/// Word operator V^(n)_w = V_{w_n; theta^n(omega)} ... V_{w_1; theta(omega)}.
/// The first factor is taken at theta(omega), not omega.
Matrix word_operator(const DisorderedEnsemble& e, const DisorderPoint& omega,
                     const OutcomeWord& w);

/// N consecutive measurements as one measurement over A^N, driven by
/// theta^N. Word operators of the grained ensemble reproduce base word
/// operators entrywise. Operators are composed on demand; realize() of the
/// result materializes |A|^N matrices and is budget-guarded.
DisorderedEnsemble coarse_grain(const DisorderedEnsemble& e, int N,
                                std::uint64_t max_alphabet = 1u << 12);

/// The Haar unitary attached to site i of omega (iid and markov models).
Matrix site_unitary(const DisorderPoint& omega, std::int64_t i, Eigen::Index d);

/// Index <-> label helpers for coarse alphabets (lexicographic, first
/// outcome most significant).
OutcomeWord decode_word_index(std::uint64_t index, int alphabet_size, int length);
std::uint64_t encode_word_index(const OutcomeWord& w, int alphabet_size);

}  // namespace dqt
