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

#include "lsfp/config_io.hpp"

#include <fstream>
#include <set>

namespace lsfp {

namespace {

template <typename T>
void read_field(const nlohmann::json &doc, const char *key, T &out)
{
    auto it = doc.find(key);
    if (it == doc.end()) return;
    try {
        out = it->get<T>();
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(key, std::string("wrong type: ") + e.what());
    }
}

} // namespace

ScenarioConfig scenario_from_json(const nlohmann::json &doc)
{
    if (!doc.is_object()) throw ConfigError("", "scenario config must be a JSON object");

    static const std::set<std::string> known = {
        "L", "K", "M", "tau_c", "tau_p", "eta", "rho_d", "sigma2", "cell_side", "min_bs_distance",
        "asd_deg", "pathloss_exponent_db_per_decade", "pathloss_intercept_db", "rician_k_intercept_db",
        "rician_k_slope_db_per_m", "height_diff_m", "fading_kind", "seed", "shadow_fading_std_db",
        "bs_positions"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError(it.key(), "unknown field");
    }

    ScenarioConfig c;
    read_field(doc, "L", c.num_cells);
    read_field(doc, "K", c.users_per_cell);
    read_field(doc, "M", c.antennas);
    read_field(doc, "tau_c", c.coherence_length);
    c.pilot_length = c.users_per_cell;
    read_field(doc, "tau_p", c.pilot_length);
    read_field(doc, "eta", c.pilot_power);
    read_field(doc, "rho_d", c.max_bs_power);
    read_field(doc, "sigma2", c.noise_power);
    read_field(doc, "cell_side", c.cell_side);
    read_field(doc, "min_bs_distance", c.min_bs_distance);
    read_field(doc, "asd_deg", c.asd_deg);
    read_field(doc, "pathloss_exponent_db_per_decade", c.pathloss_exponent_db_per_decade);
    read_field(doc, "pathloss_intercept_db", c.pathloss_intercept_db);
    read_field(doc, "rician_k_intercept_db", c.rician_k_intercept_db);
    read_field(doc, "rician_k_slope_db_per_m", c.rician_k_slope_db_per_m);
    read_field(doc, "height_diff_m", c.height_diff_m);
    read_field(doc, "seed", c.seed);
    read_field(doc, "shadow_fading_std_db", c.shadow_fading_std_db);
    read_field(doc, "bs_positions", c.bs_positions);

    if (auto it = doc.find("fading_kind"); it != doc.end()) {
        if (!it->is_string()) throw ConfigError("fading_kind", "must be a string");
        const auto kind = it->get<std::string>();
        if (kind == "rician_correlated")
            c.fading = FadingKind::RicianCorrelated;
        else if (kind == "rayleigh_uncorrelated")
            c.fading = FadingKind::RayleighUncorrelated;
        else
            throw ConfigError("fading_kind", "expected rician_correlated or rayleigh_uncorrelated");
    }

    c.validate();
    return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig &c)
{
    nlohmann::json doc = {
        {"L", c.num_cells},
        {"K", c.users_per_cell},
        {"M", c.antennas},
        {"tau_c", c.coherence_length},
        {"tau_p", c.pilot_length},
        {"eta", c.pilot_power},
        {"rho_d", c.max_bs_power},
        {"sigma2", c.noise_power},
        {"cell_side", c.cell_side},
        {"min_bs_distance", c.min_bs_distance},
        {"asd_deg", c.asd_deg},
        {"pathloss_exponent_db_per_decade", c.pathloss_exponent_db_per_decade},
        {"pathloss_intercept_db", c.pathloss_intercept_db},
        {"rician_k_intercept_db", c.rician_k_intercept_db},
        {"rician_k_slope_db_per_m", c.rician_k_slope_db_per_m},
        {"height_diff_m", c.height_diff_m},
        {"fading_kind", to_string(c.fading)},
        {"seed", c.seed},
        {"shadow_fading_std_db", c.shadow_fading_std_db},
    };
    if (!c.bs_positions.empty()) doc["bs_positions"] = c.bs_positions;
    return doc;
}

ScenarioConfig load_scenario_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path);
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError("config", path + ": " + e.what());
    }
    return scenario_from_json(doc);
}

} // namespace lsfp
