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

#include "dqtraj/serialize.hpp"

#include <nlohmann/json.hpp>

namespace dqt {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw StructureError("matrix json: expected a non-empty array of rows");
  }
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.at(0).size());
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw StructureError("matrix json: ragged rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& e = row.at(static_cast<std::size_t>(c));
      if (!e.is_array() || e.size() != 2) {
        throw StructureError("matrix json: entries must be [re, im] pairs");
      }
      m(i, c) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return m;
}

json kraus_to_json(const KrausSet& k) {
  json ops = json::array();
  for (const auto& v : k.operators) ops.push_back(matrix_to_json(v));
  return json{{"dim", k.dim}, {"operators", std::move(ops)}};
}

KrausSet kraus_from_json(const json& j) {
  const json& ops_json = j.is_array() ? j : j.at("operators");
  std::vector<Matrix> ops;
  for (const auto& o : ops_json) ops.push_back(matrix_from_json(o));
  if (ops.empty()) throw StructureError("kraus json: no operators");
  const auto dim = ops.front().rows();
  return KrausSet(dim, std::move(ops));
}

json defect_report_to_json(const DefectReport& r) {
  return json{{"N", r.N},
              {"rank", r.rank},
              {"min_defect", r.min_defect},
              {"best_frame", matrix_to_json(r.best_frame)},
              {"restarts_run", r.restarts_run},
              {"converged_restarts", r.converged_restarts},
              {"per_restart_defects", r.per_restart_defects},
              {"found_gray", r.found_gray}};
}

json omega_summary_to_json(const OmegaSummary& s) {
  return json{{"omega_seed", s.omega_seed},
              {"mean_m2", s.mean_m2},
              {"stderr_m2", s.stderr_m2},
              {"frac_pure", s.frac_pure},
              {"phi", s.phi},
              {"phi_stderr", s.phi_stderr},
              {"phi_exact", s.phi_exact},
              {"final_mean_m2", s.final_mean_m2},
              {"final_median_m2", s.final_median_m2},
              {"final_frac_pure", s.final_frac_pure},
              {"increment_sum_m2", s.increment_sum_m2}};
}

json distribution_to_json(const OutcomeDistribution& d,
                          const std::vector<std::string>& alphabet) {
  json branches = json::array();
  for (const auto& b : d.branches) {
    std::string word;
    for (int a : b.word) word += alphabet.at(static_cast<std::size_t>(a));
    branches.push_back(json{{"word", word},
                            {"probability", b.probability},
                            {"m2", purity_moment(b.state, 2)}});
  }
  return json{{"depth", d.depth},
              {"branches", std::move(branches)},
              {"pruned_mass", d.pruned_mass},
              {"total_probability", d.total_probability()}};
}

}  // namespace dqt
