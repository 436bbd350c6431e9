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
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dqt {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Probabilities below this are treated as exactly zero (dead branch).
inline constexpr double kZeroBranchThreshold = 1e-14;
/// Default validation tolerance for state/Kraus invariants.
inline constexpr double kStateTol = 1e-10;
/// Second moment at or above 1 - kPureTol counts as a pure (rank-1) state.
inline constexpr double kPureTol = 1e-8;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed inputs: dimension mismatches, invalid constructions.
class StructureError : public Error {
 public:
  explicit StructureError(const std::string& what) : Error(what) {}
};

/// A requested computation exceeds a configured budget.
class BudgetError : public Error {
 public:
  BudgetError(const std::string& what, std::uint64_t required)
      : Error(what), required_budget(required) {}
  std::uint64_t required_budget;
};

/// Operation not supported by this model variant.
class UnsupportedError : public Error {
 public:
  explicit UnsupportedError(const std::string& what) : Error(what) {}
};

/// Consistency violations that indicate a bug, not bad input.
class InternalError : public Error {
 public:
  explicit InternalError(const std::string& what) : Error(what) {}
};

/// Largest absolute entry of a matrix.
inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

/// Max-abs deviation of m from the identity.
inline double deviation_from_identity(const Matrix& m) {
  return max_abs(m - Matrix::Identity(m.rows(), m.cols()));
}

}  // namespace dqt
