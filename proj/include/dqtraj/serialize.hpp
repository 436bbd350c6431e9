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

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "dqtraj/darkness.hpp"
#include "dqtraj/quantum.hpp"
#include "dqtraj/trajectory.hpp"

// Complex numbers are serialized as [re, im] pairs everywhere; matrices as
// row arrays of such pairs.

namespace dqt {

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

nlohmann::json kraus_to_json(const KrausSet& k);
KrausSet kraus_from_json(const nlohmann::json& j);

nlohmann::json defect_report_to_json(const DefectReport& r);
nlohmann::json omega_summary_to_json(const OmegaSummary& s);
nlohmann::json distribution_to_json(const OutcomeDistribution& d,
                                    const std::vector<std::string>& alphabet);

}  // namespace dqt
