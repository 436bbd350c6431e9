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

#include <iosfwd>
#include <memory>
#include <string>

#include "dqtraj/config.hpp"
#include "dqtraj/ensemble.hpp"

namespace dqt {

// Exit codes: 0 pass, 1 quantitative failure, 2 usage/parse error.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Builds the disorder model named in the `disorder.*` block (optional for
/// site-based builtins; required fields for markov_shift).
std::shared_ptr<const DisorderModel> build_disorder_model(const Config& cfg,
                                                          Eigen::Index dim_hint);

/// Builds the ensemble named in the `ensemble.*` block, including optional
/// coarse-graining.
DisorderedEnsemble build_ensemble(const Config& cfg);

/// Master seed: `disorder.seed` (required; there is no wall-clock default).
std::uint64_t master_seed(const Config& cfg);

/// Derived omega seed for the i-th sampled disorder point of a run.
std::uint64_t omega_seed_at(std::uint64_t master, int index);

// Each command writes records to `out` (csv or jsonl per output.format) and
// human-readable summaries to `log`, and returns an exit code.
int cmd_validate(const Config& cfg, std::ostream& out, std::ostream& log);
int cmd_purify(const Config& cfg, std::ostream& out, std::ostream& log);
int cmd_enumerate(const Config& cfg, std::ostream& out, std::ostream& log);
int cmd_dark(const Config& cfg, std::ostream& out, std::ostream& log);
/// Canned reproduction runs with pass/fail summaries (ids 1, 2, 3).
int cmd_example(int id, const Config& cfg, std::ostream& out, std::ostream& log);

}  // namespace dqt
