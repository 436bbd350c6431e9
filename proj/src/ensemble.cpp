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

#include "dqtraj/ensemble.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "dqtraj/rng.hpp"

namespace dqt {

struct DisorderedEnsemble::Impl {
  virtual ~Impl() = default;

  virtual KrausSet realize_unchecked(const DisorderPoint& omega) const = 0;
  virtual Matrix realize_operator(const DisorderPoint& omega, int outcome) const {
    KrausSet k = realize_unchecked(omega);
    return k.operators.at(static_cast<std::size_t>(outcome));
  }

  Eigen::Index dim = 0;
  std::vector<std::string> alphabet;
  std::string name;
  int stride = 1;
  std::shared_ptr<const DisorderModel> model;
};

namespace {

using Impl = DisorderedEnsemble::Impl;

struct GeneratorEnsemble final : Impl {
  std::function<KrausSet(const DisorderPoint&)> generator;
  KrausSet realize_unchecked(const DisorderPoint& omega) const override {
    return generator(omega);
  }
};

struct CoarseEnsemble final : Impl {
  DisorderedEnsemble base{nullptr};
  int grain = 1;

  // The word of length N "ending" at omega: factors at omega, theta^-1(omega),
  // ..., theta^-(N-1)(omega). With this convention the grained trajectory at
  // omega walks exactly the base trajectory at omega.
  Matrix realize_operator(const DisorderPoint& omega, int outcome) const override {
    OutcomeWord w = decode_word_index(static_cast<std::uint64_t>(outcome),
                                      base.alphabet_size(), grain);
    const int base_stride = base.steps_per_measurement();
    Matrix acc;
    for (int k = grain - 1; k >= 0; --k) {
      const DisorderPoint at =
          step_n(omega, -static_cast<std::int64_t>(grain - 1 - k) * base_stride);
      Matrix v = base.realize_operator(at, w[static_cast<std::size_t>(k)]);
      acc = (k == grain - 1) ? std::move(v) : Matrix(acc * v);
    }
    return acc;
  }

  KrausSet realize_unchecked(const DisorderPoint& omega) const override {
    std::vector<Matrix> ops;
    ops.reserve(alphabet.size());
    for (int i = 0; i < static_cast<int>(alphabet.size()); ++i) {
      ops.push_back(realize_operator(omega, i));
    }
    return KrausSet(dim, std::move(ops));
  }
};

DisorderedEnsemble make_generator_ensemble(
    Eigen::Index dim, std::vector<std::string> alphabet, std::string name,
    std::shared_ptr<const DisorderModel> model,
    std::function<KrausSet(const DisorderPoint&)> gen) {
  auto impl = std::make_shared<GeneratorEnsemble>();
  impl->dim = dim;
  impl->alphabet = std::move(alphabet);
  impl->name = std::move(name);
  impl->model = std::move(model);
  impl->generator = std::move(gen);
  return DisorderedEnsemble(impl);
}

Matrix column_span_projector(const Matrix& u, const std::vector<Eigen::Index>& cols) {
  Matrix p = Matrix::Zero(u.rows(), u.rows());
  for (auto c : cols) p += u.col(c) * u.col(c).adjoint();
  return p;
}

std::shared_ptr<const DisorderModel> site_model_or_default(
    std::shared_ptr<const DisorderModel> model, Eigen::Index d) {
  if (!model) return DisorderModel::iid_haar_shift(d);
  if (model->variant() != DisorderVariant::IidHaarShift &&
      model->variant() != DisorderVariant::MarkovShift) {
    throw UnsupportedError("ensemble: model variant '" + model->variant_name() +
                           "' has no site structure");
  }
  return model;
}

}  // namespace

Eigen::Index DisorderedEnsemble::dim() const { return impl_->dim; }
const std::vector<std::string>& DisorderedEnsemble::alphabet() const {
  return impl_->alphabet;
}
const std::string& DisorderedEnsemble::name() const { return impl_->name; }
int DisorderedEnsemble::steps_per_measurement() const { return impl_->stride; }
std::shared_ptr<const DisorderModel> DisorderedEnsemble::model() const {
  return impl_->model;
}

KrausSet DisorderedEnsemble::realize(const DisorderPoint& omega) const {
  KrausSet k = impl_->realize_unchecked(omega);
  const auto v = validate_kraus(k, kStateTol);
  if (!v.pass) {
    throw EnsembleInvalidError(
        "ensemble '" + name() + "' fails completeness at seed " +
        std::to_string(omega.master_seed) + ", position " +
        std::to_string(omega.position) + ": deviation " +
        std::to_string(v.max_deviation));
  }
  return k;
}

KrausSet DisorderedEnsemble::realize_unchecked(const DisorderPoint& omega) const {
  return impl_->realize_unchecked(omega);
}

Matrix DisorderedEnsemble::realize_operator(const DisorderPoint& omega,
                                            int outcome) const {
  if (outcome < 0 || outcome >= alphabet_size()) {
    throw StructureError("realize_operator: outcome index out of range");
  }
  return impl_->realize_operator(omega, outcome);
}

Matrix site_unitary(const DisorderPoint& omega, std::int64_t i, Eigen::Index d) {
  Rng rng(site_value(omega, i));
  return haar_unitary(d, rng);
}

DisorderedEnsemble DisorderedEnsemble::example1(
    std::shared_ptr<const DisorderModel> model_in) {
  auto model = site_model_or_default(std::move(model_in), 3);
  return make_generator_ensemble(
      3, {"a", "b"}, "example1", model, [](const DisorderPoint& w) {
        const Matrix u = site_unitary(w, 0, 3);
        std::vector<Matrix> ops;
        ops.push_back(column_span_projector(u, {0, 1}));
        ops.push_back(column_span_projector(u, {2}));
        return KrausSet(3, std::move(ops));
      });
}

DisorderedEnsemble DisorderedEnsemble::example2(
    std::shared_ptr<const DisorderModel> model_in) {
  auto model = site_model_or_default(std::move(model_in), 3);
  return make_generator_ensemble(
      3, {"a", "b"}, "example2", model, [](const DisorderPoint& w) {
        const Matrix u0 = site_unitary(w, 0, 3);
        const Matrix u1 = site_unitary(w, 1, 3);
        std::vector<Matrix> ops;
        ops.push_back(u1.col(0) * u0.col(0).adjoint() +
                      u1.col(1) * u0.col(1).adjoint());
        ops.push_back(u1.col(2) * u0.col(2).adjoint());
        return KrausSet(3, std::move(ops));
      });
}

DisorderedEnsemble DisorderedEnsemble::example3(
    std::shared_ptr<const DisorderModel> model) {
  return example3_general(4, {{0, 1}, {2, 3}}, std::move(model));
}

DisorderedEnsemble DisorderedEnsemble::example3_general(
    Eigen::Index d, const std::vector<std::vector<Eigen::Index>>& partition,
    std::shared_ptr<const DisorderModel> model_in) {
  if (d < 1) throw StructureError("example3_general: dimension must be positive");
  if (partition.empty()) throw StructureError("example3_general: empty partition");
  std::vector<bool> seen(static_cast<std::size_t>(d), false);
  for (const auto& group : partition) {
    if (group.empty()) throw StructureError("example3_general: empty group");
    for (auto c : group) {
      if (c < 0 || c >= d) {
        throw StructureError("example3_general: column index out of range");
      }
      if (seen[static_cast<std::size_t>(c)]) {
        throw StructureError("example3_general: column appears twice");
      }
      seen[static_cast<std::size_t>(c)] = true;
    }
  }
  for (bool b : seen) {
    if (!b) throw StructureError("example3_general: partition must cover all columns");
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < partition.size(); ++i) {
    labels.push_back(partition.size() <= 26
                         ? std::string(1, static_cast<char>('a' + i))
                         : "g" + std::to_string(i));
  }
  auto model = site_model_or_default(std::move(model_in), d);
  std::string nm = (d == 4 && partition.size() == 2 && partition[0].size() == 2 &&
                    partition[0][0] == 0 && partition[0][1] == 1)
                       ? "example3"
                       : "example3_general";
  return make_generator_ensemble(
      d, std::move(labels), std::move(nm), model,
      [d, partition](const DisorderPoint& w) {
        const Matrix u = site_unitary(w, 0, d);
        std::vector<Matrix> ops;
        ops.reserve(partition.size());
        for (const auto& group : partition) {
          ops.push_back(column_span_projector(u, group));
        }
        return KrausSet(d, std::move(ops));
      });
}

DisorderedEnsemble DisorderedEnsemble::point_disorder(KrausSet k,
                                                      std::vector<std::string> labels) {
  // Completeness is checked at realize() time so that `validate` can report
  // the deviation of a bad literal set instead of failing to construct.
  if (labels.empty()) {
    for (std::size_t i = 0; i < k.size(); ++i) labels.push_back(std::to_string(i));
  }
  if (labels.size() != k.size()) {
    throw StructureError("point_disorder: one label per operator required");
  }
  auto model = DisorderModel::point();
  const auto dim = k.dim;
  return make_generator_ensemble(
      dim, std::move(labels), "point", model,
      [k = std::move(k)](const DisorderPoint&) { return k; });
}

DisorderedEnsemble DisorderedEnsemble::rotation_qubit(double alpha) {
  auto model = DisorderModel::rotation(alpha);
  return make_generator_ensemble(
      2, {"0", "1"}, "rotation_qubit", model, [](const DisorderPoint& w) {
        const double phi = 2.0 * M_PI * rotation_phase(w);
        Matrix r(2, 2);
        r << std::cos(phi), -std::sin(phi), std::sin(phi), std::cos(phi);
        std::vector<Matrix> ops;
        ops.push_back(r.col(0) * r.col(0).adjoint());
        ops.push_back(r.col(1) * r.col(1).adjoint());
        return KrausSet(2, std::move(ops));
      });
}

DisorderPoint advance(const DisorderedEnsemble& e, const DisorderPoint& omega) {
  return step_n(omega, e.steps_per_measurement());
}

Matrix word_operator(const DisorderedEnsemble& e, const DisorderPoint& omega,
                     const OutcomeWord& w) {
  if (w.empty()) throw StructureError("word_operator: empty word");
  for (int a : w) {
    if (a < 0 || a >= e.alphabet_size()) {
      throw StructureError("word_operator: outcome index out of range");
    }
  }
  DisorderPoint cur = omega;
  Matrix acc;
  for (std::size_t k = 0; k < w.size(); ++k) {
    cur = advance(e, cur);
    Matrix v = e.realize_operator(cur, w[k]);
    acc = (k == 0) ? std::move(v) : Matrix(v * acc);
  }
  return acc;
}

DisorderedEnsemble coarse_grain(const DisorderedEnsemble& e, int N,
                                std::uint64_t max_alphabet) {
  if (N < 1) throw StructureError("coarse_grain: N must be >= 1");
  if (N == 1) return e;
  const double count = std::pow(static_cast<double>(e.alphabet_size()), N);
  if (count > static_cast<double>(max_alphabet)) {
    throw BudgetError("coarse_grain: |A|^N exceeds the alphabet budget",
                      static_cast<std::uint64_t>(count));
  }
  auto impl = std::make_shared<CoarseEnsemble>();
  impl->dim = e.dim();
  impl->name = e.name() + ".grain" + std::to_string(N);
  impl->model = e.model();
  impl->stride = e.steps_per_measurement() * N;
  impl->base = e;
  impl->grain = N;
  const auto n_words = static_cast<std::uint64_t>(count);
  for (std::uint64_t i = 0; i < n_words; ++i) {
    OutcomeWord w = decode_word_index(i, e.alphabet_size(), N);
    std::string label;
    for (int a : w) label += e.alphabet()[static_cast<std::size_t>(a)];
    impl->alphabet.push_back(std::move(label));
  }
  return DisorderedEnsemble(impl);
}

OutcomeWord decode_word_index(std::uint64_t index, int alphabet_size, int length) {
  OutcomeWord w(static_cast<std::size_t>(length));
  for (int k = length - 1; k >= 0; --k) {
    w[static_cast<std::size_t>(k)] =
        static_cast<int>(index % static_cast<std::uint64_t>(alphabet_size));
    index /= static_cast<std::uint64_t>(alphabet_size);
  }
  if (index != 0) throw StructureError("decode_word_index: index out of range");
  return w;
}

std::uint64_t encode_word_index(const OutcomeWord& w, int alphabet_size) {
  std::uint64_t index = 0;
  for (int a : w) {
    index = index * static_cast<std::uint64_t>(alphabet_size) +
            static_cast<std::uint64_t>(a);
  }
  return index;
}

}  // namespace dqt
