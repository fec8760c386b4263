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

#ifndef LSFP_HARNESS_HPP
#define LSFP_HARNESS_HPP

#include "lsfp/common.hpp"
#include "lsfp/linkstats.hpp"
#include "lsfp/optimizer.hpp"
#include "lsfp/scenario.hpp"
#include "lsfp/se_eval.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lsfp {

enum class Precoding { LSFP, SLP, LPA };

std::string to_string(Precoding precoding);

struct SchemeSpec {
    std::string name;
    EstimatorKind estimator = EstimatorKind::LMMSE;
    Precoding precoding = Precoding::LSFP;
    std::optional<Objective> objective;
    std::optional<PartialMethod> partial;
    int n_d = -1; // partial only; -1 means L*K/2

    void validate() const;
};

/// Parses names such as "LSFP-SumSE", "SLP-PropFair", "P-DS-LSFP-SumSE",
/// "P-DS+Int-LSFP-SumSE@6" or "LPA", optionally prefixed with "LS:" or "LMMSE:".
SchemeSpec parse_scheme(const std::string &text, EstimatorKind default_estimator = EstimatorKind::LMMSE,
                        int default_n_d = -1);

/// Comma-separated list of scheme names.
std::vector<SchemeSpec> parse_scheme_list(const std::string &text, EstimatorKind default_estimator = EstimatorKind::LMMSE,
                                          int default_n_d = -1);

/// Downlink symbols shared over the fronthaul per coherence block.
long fronthaul_symbols(const SchemeSpec &scheme, const ScenarioConfig &config);

struct SchemeSolution {
    LsfpWeights weights;
    std::optional<SolverDiagnostics> diagnostics; // absent for LPA
    int n_d = 0;
};

/// Weights for one scheme on one set of link statistics.
SchemeSolution solve_scheme(const SchemeSpec &scheme, const LinkStatistics &ls, const ScenarioConfig &config,
                            const SolverOptions &base);

/// SE of every user, index l * K + k.
std::vector<double> user_spectral_efficiency(const LsfpWeights &weights, const LinkStatistics &ls,
                                             const ScenarioConfig &config);

struct RunOptions {
    int threads = 0;
    SolverOptions solver;
    long mc_validate_samples = 0;
    bool keep_debug = false;
};

struct SchemeOutcome {
    std::vector<double> se; // index l * K + k
    std::optional<SolverDiagnostics> diagnostics;
    int n_d = 0;
    double max_power_ratio = 0.0;
    double mc_max_se_deviation = -1.0; // relative; negative when not validated
    nlohmann::json weights_dump;       // only with keep_debug
};

struct SetupOutcome {
    std::vector<SchemeOutcome> schemes;
    nlohmann::json linkstats_dump; // only with keep_debug
};

struct SchemeSummary {
    std::string name;
    std::vector<double> sorted_se;
    double median = 0.0;
    double p10 = 0.0;
    double p05 = 0.0;
    double mean = 0.0;
    double sum_se = 0.0; // over all setups and users
    long fronthaul = 0;
    int converged = 0;
    int not_converged = 0;
    double max_power_ratio = 0.0;
    double mc_max_se_deviation = -1.0;
};

struct ExperimentResult {
    ScenarioConfig config;
    std::vector<SchemeSpec> schemes;
    int n_setups = 0;
    std::uint64_t seed = 0;
    std::vector<SetupOutcome> setups;
    std::vector<SchemeSummary> summaries;

    int total_not_converged() const;
};

/// Lower empirical quantile: sorted[ceil(p n) - 1], clamped to the valid range.
double percentile(const std::vector<double> &sorted, double p);

ExperimentResult run_experiment(const ScenarioConfig &config, const std::vector<SchemeSpec> &schemes, int n_setups,
                                std::uint64_t seed, const RunOptions &options = {});

/// Writes per_user_se.csv, cdf.csv, summary.json and diagnostics.json, plus
/// cdf.svg and debug/ when requested.
void emit_outputs(const ExperimentResult &result, const std::string &out_dir, bool svg = false);

nlohmann::json summary_to_json(const ExperimentResult &result);

/// "%.12g" rendering used by every emitted file.
std::string format_number(double value);

/// Rounds every floating-point value in `doc` to 12 significant digits.
void round_json_numbers(nlohmann::json &doc);

struct ValidationRow {
    std::string estimator;
    std::string quantity;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// Closed form against Monte Carlo on the network drawn from config.seed.
std::vector<ValidationRow> validate_linkstats(const ScenarioConfig &config, long samples, int threads = 0);

} // namespace lsfp

#endif
