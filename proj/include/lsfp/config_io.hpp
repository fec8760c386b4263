// SPDX-License-Identifier: Apache-2.0
//
// lsfp: two-layer downlink precoding for multi-cell massive MIMO
// Copyright (C) 2026 The lsfp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef LSFP_CONFIG_IO_HPP
#define LSFP_CONFIG_IO_HPP

#include "lsfp/scenario.hpp"

#include <json.hpp>

#include <string>

namespace lsfp {

// JSON keys follow the short scenario names (L, K, M, tau_c, tau_p, eta,
// rho_d, sigma2, ...). Angles are given in degrees. Missing keys keep their
// defaults; unknown keys are rejected.
ScenarioConfig scenario_from_json(const nlohmann::json &doc);
nlohmann::json scenario_to_json(const ScenarioConfig &config);
ScenarioConfig load_scenario_config(const std::string &path);

} // namespace lsfp

#endif
