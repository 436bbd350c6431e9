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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dqtraj/darkness.hpp"
#include "dqtraj/trajectory.hpp"

namespace py = pybind11;
using namespace dqt;

PYBIND11_MODULE(_dqtraj, m) {
  m.doc() = "Disordered quantum trajectories: Kraus ensembles, purification "
            "diagnostics, and gray/dark projection search";

  // Base first: translators run in reverse registration order, so the
  // derived mappings must be registered after (and thus tried before) it.
  py::register_exception<Error>(m, "DqtrajError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);
  py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<EnsembleInvalidError>(m, "EnsembleInvalidError",
                                               PyExc_ValueError);

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("uniform", &Rng::uniform)
      .def("normal", &Rng::normal);

  m.def("mix64",
        py::overload_cast<std::uint64_t, std::int64_t>(&mix64),
        py::arg("seed"), py::arg("index"));

  py::class_<DensityMatrix>(m, "DensityMatrix")
      .def_static("from_matrix", &DensityMatrix::from_matrix, py::arg("matrix"))
      .def_static("maximally_mixed", &DensityMatrix::maximally_mixed, py::arg("dim"))
      .def_static("pure", &DensityMatrix::pure, py::arg("psi"))
      .def_static("zero", &DensityMatrix::zero, py::arg("dim"))
      .def_static("random_mixed", &DensityMatrix::random_mixed, py::arg("dim"),
                  py::arg("rng"))
      .def_static("random_pure", &DensityMatrix::random_pure, py::arg("dim"),
                  py::arg("rng"))
      .def_property_readonly("dim", &DensityMatrix::dim)
      .def_property_readonly("is_zero", &DensityMatrix::is_zero)
      .def("matrix", &DensityMatrix::matrix, py::return_value_policy::copy);

  py::class_<Projection>(m, "Projection")
      .def_static("from_matrix", &Projection::from_matrix, py::arg("matrix"))
      .def_property_readonly("dim", &Projection::dim)
      .def_property_readonly("rank", &Projection::rank)
      .def("matrix", &Projection::matrix, py::return_value_policy::copy);

  py::class_<KrausSet>(m, "KrausSet")
      .def(py::init([](const std::vector<Matrix>& ops) {
             if (ops.empty()) throw StructureError("KrausSet: no operators");
             return KrausSet(ops.front().rows(), ops);
           }),
           py::arg("operators"))
      .def_readonly("dim", &KrausSet::dim)
      .def_readonly("operators", &KrausSet::operators);

  py::class_<KrausValidation>(m, "KrausValidation")
      .def_readonly("pass_", &KrausValidation::pass)
      .def_readonly("max_deviation", &KrausValidation::max_deviation);

  m.def("validate_kraus", &validate_kraus, py::arg("kraus"),
        py::arg("tol") = kStateTol);
  m.def(
      "apply_measurement",
      [](const Matrix& v, const DensityMatrix& rho) {
        const auto out = apply_measurement(v, rho);
        return py::make_tuple(out.post_state, out.prob);
      },
      py::arg("operator"), py::arg("rho"));
  m.def("purity_moment", &purity_moment, py::arg("rho"), py::arg("m"));
  m.def("trace_distance", &trace_distance, py::arg("rho"), py::arg("rho_prime"));
  m.def("haar_unitary",
        py::overload_cast<Eigen::Index, Rng&>(&haar_unitary), py::arg("dim"),
        py::arg("rng"));
  m.def(
      "haar_unitary",
      [](Eigen::Index d, std::uint64_t seed) {
        Rng rng(seed);
        return haar_unitary(d, rng);
      },
      py::arg("dim"), py::arg("seed"));

  py::enum_<DisorderVariant>(m, "DisorderVariant")
      .value("IID_HAAR_SHIFT", DisorderVariant::IidHaarShift)
      .value("MARKOV_SHIFT", DisorderVariant::MarkovShift)
      .value("ROTATION", DisorderVariant::Rotation)
      .value("POINT", DisorderVariant::Point);

  py::class_<DisorderModel, std::shared_ptr<DisorderModel>>(m, "DisorderModel")
      .def_static("iid_haar_shift",
                  [](Eigen::Index d) {
                    return std::const_pointer_cast<DisorderModel>(
                        DisorderModel::iid_haar_shift(d));
                  },
                  py::arg("dim"))
      .def_static("markov_shift",
                  [](const Eigen::MatrixXd& t, std::vector<std::uint64_t> seeds) {
                    return std::const_pointer_cast<DisorderModel>(
                        DisorderModel::markov_shift(t, std::move(seeds)));
                  },
                  py::arg("transition"), py::arg("state_seeds"))
      .def_static("rotation",
                  [](double alpha) {
                    return std::const_pointer_cast<DisorderModel>(
                        DisorderModel::rotation(alpha));
                  },
                  py::arg("alpha"))
      .def_static("point",
                  []() {
                    return std::const_pointer_cast<DisorderModel>(
                        DisorderModel::point());
                  })
      .def_property_readonly("variant", &DisorderModel::variant)
      .def_property_readonly("variant_name", &DisorderModel::variant_name)
      .def("sample_point", &DisorderModel::sample_point, py::arg("seed"));

  py::class_<DisorderPoint>(m, "DisorderPoint")
      .def_readonly("master_seed", &DisorderPoint::master_seed)
      .def_readonly("position", &DisorderPoint::position)
      .def("__eq__", [](const DisorderPoint& a, const DisorderPoint& b) {
        return a == b;
      });

  m.def("step", &step, py::arg("omega"));
  m.def("step_back", &step_back, py::arg("omega"));
  m.def("step_n", &step_n, py::arg("omega"), py::arg("n"));
  m.def("site_value", &site_value, py::arg("omega"), py::arg("i"));
  m.def("rotation_phase", &rotation_phase, py::arg("omega"));
  m.def("markov_state", &markov_state, py::arg("omega"), py::arg("i"));
  m.def("site_unitary", &site_unitary, py::arg("omega"), py::arg("i"),
        py::arg("dim"));

  py::class_<DisorderedEnsemble>(m, "DisorderedEnsemble")
      .def_static("example1", &DisorderedEnsemble::example1,
                  py::arg("model") = nullptr)
      .def_static("example2", &DisorderedEnsemble::example2,
                  py::arg("model") = nullptr)
      .def_static("example3", &DisorderedEnsemble::example3,
                  py::arg("model") = nullptr)
      .def_static("example3_general", &DisorderedEnsemble::example3_general,
                  py::arg("dim"), py::arg("partition"), py::arg("model") = nullptr)
      .def_static("point_disorder", &DisorderedEnsemble::point_disorder,
                  py::arg("kraus"), py::arg("labels") = std::vector<std::string>{})
      .def_static("rotation_qubit", &DisorderedEnsemble::rotation_qubit,
                  py::arg("alpha"))
      .def_property_readonly("dim", &DisorderedEnsemble::dim)
      .def_property_readonly("alphabet", &DisorderedEnsemble::alphabet)
      .def_property_readonly("name", &DisorderedEnsemble::name)
      .def_property_readonly("steps_per_measurement",
                             &DisorderedEnsemble::steps_per_measurement)
      .def("model",
           [](const DisorderedEnsemble& e) {
             return std::const_pointer_cast<DisorderModel>(e.model());
           })
      .def("realize", &DisorderedEnsemble::realize, py::arg("omega"))
      .def("realize_operator", &DisorderedEnsemble::realize_operator,
           py::arg("omega"), py::arg("outcome"));

  m.def("advance", &advance, py::arg("ensemble"), py::arg("omega"));
  m.def("word_operator", &word_operator, py::arg("ensemble"), py::arg("omega"),
        py::arg("word"));
  m.def("coarse_grain", &coarse_grain, py::arg("ensemble"), py::arg("N"),
        py::arg("max_alphabet") = std::uint64_t{1} << 12);

  py::class_<TrajectoryRecord>(m, "TrajectoryRecord")
      .def_readonly("omega_seed", &TrajectoryRecord::omega_seed)
      .def_readonly("outcomes", &TrajectoryRecord::outcomes)
      .def_readonly("states", &TrajectoryRecord::states)
      .def_readonly("step_probs", &TrajectoryRecord::step_probs);

  py::class_<OutcomeBranch>(m, "OutcomeBranch")
      .def_readonly("word", &OutcomeBranch::word)
      .def_readonly("probability", &OutcomeBranch::probability)
      .def_readonly("state", &OutcomeBranch::state);

  py::class_<OutcomeDistribution>(m, "OutcomeDistribution")
      .def_readonly("depth", &OutcomeDistribution::depth)
      .def_readonly("branches", &OutcomeDistribution::branches)
      .def_readonly("pruned_mass", &OutcomeDistribution::pruned_mass)
      .def("total_probability", &OutcomeDistribution::total_probability);

  py::class_<MomentEstimate>(m, "MomentEstimate")
      .def_readonly("value", &MomentEstimate::value)
      .def_readonly("std_error", &MomentEstimate::std_error)
      .def_readonly("exact", &MomentEstimate::exact);

  m.def(
      "sample_trajectory",
      [](const DisorderedEnsemble& e, const DisorderPoint& omega,
         const DensityMatrix& rho0, int n_steps, std::uint64_t seed) {
        Rng rng(seed);
        return sample_trajectory(e, omega, rho0, n_steps, rng);
      },
      py::arg("ensemble"), py::arg("omega"), py::arg("rho0"), py::arg("n_steps"),
      py::arg("seed"));
  m.def("enumerate_distribution", &enumerate_distribution, py::arg("ensemble"),
        py::arg("omega"), py::arg("rho0"), py::arg("depth"),
        py::arg("max_branches") = kDefaultBranchBudget);
  m.def(
      "expected_moment",
      [](const DisorderedEnsemble& e, const DisorderPoint& omega,
         const DensityMatrix& rho0, int mm, int depth, std::uint64_t max_branches) {
        ExpectedMomentOptions opts;
        opts.max_branches = max_branches;
        return expected_moment(e, omega, rho0, mm, depth, opts);
      },
      py::arg("ensemble"), py::arg("omega"), py::arg("rho0"), py::arg("m"),
      py::arg("depth"), py::arg("max_branches") = kDefaultBranchBudget);
  m.def("submartingale_gap", &submartingale_gap, py::arg("kraus"), py::arg("rho"),
        py::arg("m"));
  m.def("delta_m", &delta_m, py::arg("kraus"), py::arg("rho"), py::arg("m"));
  m.def(
      "increment_sum",
      [](const DisorderedEnsemble& e, const DisorderPoint& omega,
         const DensityMatrix& rho0, int mm, int n_max) {
        return increment_sum(e, omega, rho0, mm, n_max).partial_sums;
      },
      py::arg("ensemble"), py::arg("omega"), py::arg("rho0"), py::arg("m"),
      py::arg("n_max"));

  py::class_<Frame>(m, "Frame")
      .def_static("from_matrix", &Frame::from_matrix, py::arg("columns"))
      .def_static("random", &Frame::random, py::arg("dim"), py::arg("rank"),
                  py::arg("rng"))
      .def_property_readonly("dim", &Frame::dim)
      .def_property_readonly("rank", &Frame::rank)
      .def("columns", &Frame::columns, py::return_value_policy::copy);

  py::class_<SearchConfig>(m, "SearchConfig")
      .def(py::init<>())
      .def_readwrite("restarts", &SearchConfig::restarts)
      .def_readwrite("max_iters", &SearchConfig::max_iters)
      .def_readwrite("grad_tol", &SearchConfig::grad_tol)
      .def_readwrite("found_tol", &SearchConfig::found_tol)
      .def_readwrite("seed", &SearchConfig::seed)
      .def_readwrite("max_words", &SearchConfig::max_words);

  py::class_<DefectReport>(m, "DefectReport")
      .def_readonly("N", &DefectReport::N)
      .def_readonly("rank", &DefectReport::rank)
      .def_readonly("min_defect", &DefectReport::min_defect)
      .def_readonly("best_frame", &DefectReport::best_frame)
      .def_readonly("restarts_run", &DefectReport::restarts_run)
      .def_readonly("converged_restarts", &DefectReport::converged_restarts)
      .def_readonly("per_restart_defects", &DefectReport::per_restart_defects)
      .def_readonly("found_gray", &DefectReport::found_gray);

  py::class_<DarkCandidateReport>(m, "DarkCandidateReport")
      .def_readonly("is_candidate", &DarkCandidateReport::is_candidate)
      .def_readonly("defects", &DarkCandidateReport::defects)
      .def_readonly("lambdas", &DarkCandidateReport::lambdas);

  py::class_<EmptyProbabilityEstimate>(m, "EmptyProbabilityEstimate")
      .def_readonly("fraction", &EmptyProbabilityEstimate::fraction)
      .def_readonly("ci_low", &EmptyProbabilityEstimate::ci_low)
      .def_readonly("ci_high", &EmptyProbabilityEstimate::ci_high)
      .def_readonly("n_omegas", &EmptyProbabilityEstimate::n_omegas)
      .def_readonly("empty_flags", &EmptyProbabilityEstimate::empty_flags)
      .def_property_readonly_static(
          "note", [](py::object) { return EmptyProbabilityEstimate::kNote; });

  m.def("word_grams", &word_grams, py::arg("ensemble"), py::arg("omega"),
        py::arg("N"), py::arg("max_words") = kDefaultWordBudget);
  m.def("defect", &defect, py::arg("ensemble"), py::arg("omega"), py::arg("frame"),
        py::arg("N"), py::arg("max_words") = kDefaultWordBudget);
  m.def("defect_gradient", &defect_gradient, py::arg("ensemble"), py::arg("omega"),
        py::arg("frame"), py::arg("N"), py::arg("max_words") = kDefaultWordBudget);
  m.def("search_gray", &search_gray, py::arg("ensemble"), py::arg("omega"),
        py::arg("N"), py::arg("rank"), py::arg("config") = SearchConfig{});
  m.def("verify_dark_candidate", &verify_dark_candidate, py::arg("ensemble"),
        py::arg("omega"), py::arg("frame"), py::arg("N_max"), py::arg("tol"),
        py::arg("max_words") = kDefaultWordBudget);
  m.def("example2_certificate", &example2_certificate, py::arg("omega"));
  m.def(
      "isometry_proportionality",
      [](const Matrix& v_next, const Matrix& v_prev) {
        const auto r = isometry_proportionality(v_next, v_prev);
        return py::make_tuple(r.deviation, r.mu);
      },
      py::arg("v_next"), py::arg("v_prev"));
  m.def("estimate_empty_probability", &estimate_empty_probability,
        py::arg("ensemble"), py::arg("N"), py::arg("r_min"), py::arg("r_max"),
        py::arg("n_omegas"), py::arg("config") = SearchConfig{},
        py::arg("evidence_tol") = kGrayEvidenceTol);

  m.attr("ZERO_BRANCH_THRESHOLD") = kZeroBranchThreshold;
  m.attr("STATE_TOL") = kStateTol;
  m.attr("PURE_TOL") = kPureTol;
  m.attr("GRAY_FOUND_TOL") = kGrayFoundTol;
  m.attr("GRAY_EVIDENCE_TOL") = kGrayEvidenceTol;
}
