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

#include "dqtraj/darkness.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <limits>

namespace dqt {

namespace {

/// Thin QR retraction back onto the Stiefel manifold.
Matrix qr_retract(const Matrix& m) {
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  const Matrix r = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    const Complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= (a > 0.0) ? std::conj(rjj) / a : Complex(1.0, 0.0);
  }
  return q;
}

double lambda_of(const Matrix& compressed) {
  return compressed.trace().real() / static_cast<double>(compressed.rows());
}

}  // namespace

Frame Frame::from_matrix(const Matrix& columns) {
  const auto d = columns.rows();
  const auto r = columns.cols();
  if (r < 2 || r > d) {
    throw StructureError("Frame: rank must lie in [2, d]");
  }
  if (deviation_from_identity(columns.adjoint() * columns) > kStateTol) {
    throw StructureError("Frame: columns are not orthonormal within tolerance");
  }
  return Frame(columns);
}

Frame Frame::random(Eigen::Index d, Eigen::Index r, Rng& rng) {
  if (r < 2 || r > d) throw StructureError("Frame: rank must lie in [2, d]");
  return Frame(haar_frame(d, r, rng));
}

std::vector<Matrix> word_grams(const DisorderedEnsemble& e,
                               const DisorderPoint& omega, int N,
                               std::uint64_t max_words) {
  if (N < 1) throw StructureError("word_grams: N must be >= 1");
  const double count = std::pow(static_cast<double>(e.alphabet_size()), N);
  if (count > static_cast<double>(max_words)) {
    throw BudgetError("word_grams: |A|^N exceeds the word budget",
                      static_cast<std::uint64_t>(count));
  }
  std::vector<Matrix> grams;
  grams.reserve(static_cast<std::size_t>(count));
  // Depth-first prefix products: the factor at level k lives at theta^k.
  const std::function<void(const DisorderPoint&, const Matrix&, int)> walk =
      [&](const DisorderPoint& at, const Matrix& prefix, int level) {
        if (level == N) {
          grams.push_back(prefix.adjoint() * prefix);
          return;
        }
        const DisorderPoint next = advance(e, at);
        for (int a = 0; a < e.alphabet_size(); ++a) {
          const Matrix v = e.realize_operator(next, a);
          walk(next, level == 0 ? v : Matrix(v * prefix), level + 1);
        }
      };
  walk(omega, Matrix::Identity(e.dim(), e.dim()), 0);
  return grams;
}

double defect_from_grams(const std::vector<Matrix>& grams, const Matrix& frame) {
  double total = 0.0;
  for (const auto& w : grams) {
    const Matrix h = frame.adjoint() * w * frame;
    const double lambda = lambda_of(h);
    total += (h - lambda * Matrix::Identity(h.rows(), h.cols())).squaredNorm();
  }
  return total;
}

Matrix defect_gradient_from_grams(const std::vector<Matrix>& grams,
                                  const Matrix& frame) {
  Matrix grad = Matrix::Zero(frame.rows(), frame.cols());
  for (const auto& w : grams) {
    const Matrix h = frame.adjoint() * w * frame;
    const double lambda = lambda_of(h);
    const Matrix e = h - lambda * Matrix::Identity(h.rows(), h.cols());
    grad += 4.0 * (w * frame * e);
  }
  // Project to the Stiefel tangent space.
  const Matrix fg = frame.adjoint() * grad;
  return grad - frame * (0.5 * (fg + fg.adjoint()));
}

double defect(const DisorderedEnsemble& e, const DisorderPoint& omega,
              const Frame& f, int N, std::uint64_t max_words) {
  if (f.dim() != e.dim()) throw StructureError("defect: frame/ensemble dimension mismatch");
  return defect_from_grams(word_grams(e, omega, N, max_words), f.columns());
}

Matrix defect_gradient(const DisorderedEnsemble& e, const DisorderPoint& omega,
                       const Frame& f, int N, std::uint64_t max_words) {
  if (f.dim() != e.dim()) {
    throw StructureError("defect_gradient: frame/ensemble dimension mismatch");
  }
  return defect_gradient_from_grams(word_grams(e, omega, N, max_words), f.columns());
}

namespace {

struct RestartResult {
  double defect = 0.0;
  Matrix frame;
  bool converged = false;
};

RestartResult minimize_defect(const std::vector<Matrix>& grams, Matrix f,
                              const SearchConfig& cfg) {
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-18;
  double step = 1.0;
  double value = defect_from_grams(grams, f);
  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    if (value < cfg.found_tol) return {value, f, true};
    const Matrix grad = defect_gradient_from_grams(grams, f);
    const double gnorm2 = grad.squaredNorm();
    if (std::sqrt(gnorm2) < cfg.grad_tol) return {value, f, true};
    bool accepted = false;
    while (step > kMinStep) {
      const Matrix cand = qr_retract(f - step * grad);
      const double cand_value = defect_from_grams(grams, cand);
      if (cand_value <= value - kArmijo * step * gnorm2) {
        f = cand;
        value = cand_value;
        step = std::min(step * 2.0, 1e6);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Line search exhausted: numerically stationary.
      return {value, f, true};
    }
  }
  return {value, f, false};
}

}  // namespace

DefectReport search_gray(const DisorderedEnsemble& e, const DisorderPoint& omega,
                         int N, int r, const SearchConfig& config) {
  if (r < 2 || r > e.dim()) {
    throw StructureError("search_gray: rank must lie in [2, d]");
  }
  if (config.restarts < 1) throw StructureError("search_gray: restarts must be >= 1");
  const auto grams = word_grams(e, omega, N, config.max_words);

  DefectReport report;
  report.N = N;
  report.rank = r;
  report.restarts_run = config.restarts;
  report.per_restart_defects.resize(static_cast<std::size_t>(config.restarts));

  double best = std::numeric_limits<double>::infinity();
  Matrix best_frame;
  int converged = 0;
  for (int j = 0; j < config.restarts; ++j) {
    // Per-restart stream from (seed, restart index): reproducible under any
    // parallel schedule.
    Rng rng(mix64(config.seed, j));
    const auto res = minimize_defect(grams, haar_frame(e.dim(), r, rng), config);
    if (!std::isfinite(res.defect)) {
      throw InternalError("search_gray: non-finite defect");
    }
    report.per_restart_defects[static_cast<std::size_t>(j)] = res.defect;
    if (res.converged) ++converged;
    if (res.defect < best) {
      best = res.defect;
      best_frame = res.frame;
    }
  }
  report.converged_restarts = converged;
  report.min_defect = best;
  report.best_frame = best_frame;
  report.found_gray = best < config.found_tol;
  return report;
}

DarkCandidateReport verify_dark_candidate(const DisorderedEnsemble& e,
                                          const DisorderPoint& omega,
                                          const Frame& f, int N_max, double tol,
                                          std::uint64_t max_words) {
  if (N_max < 1) throw StructureError("verify_dark_candidate: N_max must be >= 1");
  DarkCandidateReport report;
  report.is_candidate = true;
  const double r = static_cast<double>(f.rank());
  for (int N = 1; N <= N_max; ++N) {
    const auto grams = word_grams(e, omega, N, max_words);
    double d = 0.0;
    std::vector<double> lambdas;
    lambdas.reserve(grams.size());
    for (const auto& w : grams) {
      const Matrix h = f.columns().adjoint() * w * f.columns();
      const double lambda = h.trace().real() / r;
      lambdas.push_back(lambda);
      d += (h - lambda * Matrix::Identity(h.rows(), h.cols())).squaredNorm();
    }
    report.defects.push_back(d);
    report.lambdas.push_back(std::move(lambdas));
    if (!(d <= tol)) report.is_candidate = false;
  }
  return report;
}

Frame example2_certificate(const DisorderPoint& omega) {
  if (!omega.model || omega.model->variant() != DisorderVariant::IidHaarShift ||
      omega.model->haar_dim() != 3) {
    throw StructureError(
        "example2_certificate: point does not belong to the example2 model "
        "(iid_haar_shift, d = 3)");
  }
  const Matrix u1 = site_unitary(omega, 1, 3);
  return Frame::from_matrix(u1.leftCols(2));
}

IsometryProportionality isometry_proportionality(const Matrix& V_next,
                                                 const Matrix& V_prev) {
  if (V_next.rows() != V_prev.rows() || V_next.cols() != V_prev.cols()) {
    throw StructureError("isometry_proportionality: dimension mismatch");
  }
  Eigen::JacobiSVD<Matrix> svd(V_prev, Eigen::ComputeThinU);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  const double cutoff = std::max(1e-12, smax * 1e-12);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    if (svd.singularValues()(i) > cutoff) ++rank;
  }
  if (rank == 0) {
    throw StructureError("isometry_proportionality: V_prev has zero range");
  }
  const Matrix q = svd.matrixU().leftCols(rank);
  const Matrix m = q.adjoint() * V_next.adjoint() * V_next * q;
  const double mu = m.trace().real() / static_cast<double>(rank);
  const double dev =
      (m - mu * Matrix::Identity(rank, rank)).norm();
  return {dev, mu};
}

EmptyProbabilityEstimate estimate_empty_probability(const DisorderedEnsemble& e,
                                                    int N, int r_min, int r_max,
                                                    int n_omegas,
                                                    const SearchConfig& config,
                                                    double evidence_tol) {
  if (r_min < 2 || r_max > e.dim() || r_min > r_max) {
    throw StructureError("estimate_empty_probability: bad rank range");
  }
  if (n_omegas < 1) {
    throw StructureError("estimate_empty_probability: need at least one omega");
  }
  EmptyProbabilityEstimate est;
  est.n_omegas = n_omegas;
  int empties = 0;
  for (int i = 0; i < n_omegas; ++i) {
    const std::uint64_t omega_seed = mix64(config.seed, i, 0x0e5a);
    const DisorderPoint omega = e.model()->sample_point(omega_seed);
    bool empty = true;
    for (int r = r_min; r <= r_max && empty; ++r) {
      SearchConfig cfg = config;
      cfg.seed = mix64(config.seed, i, r);
      const auto rep = search_gray(e, omega, N, r, cfg);
      if (rep.min_defect <= evidence_tol) empty = false;
    }
    est.empty_flags.push_back(empty);
    if (empty) ++empties;
  }
  const double n = static_cast<double>(n_omegas);
  const double p = static_cast<double>(empties) / n;
  // Wilson 95% interval.
  const double z = 1.959963984540054;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  est.fraction = p;
  est.ci_low = std::max(0.0, center - half);
  est.ci_high = std::min(1.0, center + half);
  return est;
}

}  // namespace dqt
