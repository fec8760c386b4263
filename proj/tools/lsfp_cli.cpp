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
#include "lsfp/harness.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <map>
#include <string>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;

int thread_override(int requested)
{
    if (const char *env = std::getenv("LSFP_THREADS")) {
        try {
            return std::stoi(env);
        } catch (const std::exception &) {
            throw lsfp::ConfigError("LSFP_THREADS", "not an integer");
        }
    }
    return requested;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"lsfp: two-layer downlink precoding experiments for multi-cell massive MIMO"};
    app.require_subcommand(1);

    std::string config_path;
    std::string schemes = "LSFP-SumSE,SLP-SumSE,LPA";
    int setups = 1;
    std::uint64_t seed = 0;
    std::string out_dir;
    int threads = 0;
    long mc_samples = 0;
    bool svg = false;
    bool strict = false;
    bool debug_dump = false;
    std::string estimator = "LMMSE";
    int partial_nd = -1;
    lsfp::SolverOptions solver;

    CLI::App *run = app.add_subcommand("run", "run schemes over random setups and write CSV/JSON outputs");
    run->add_option("--config", config_path, "scenario JSON")->required();
    run->add_option("--schemes", schemes, "comma-separated scheme names");
    run->add_option("--setups", setups, "number of random setups")->required();
    run->add_option("--seed", seed, "base seed")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    run->add_option("--threads", threads, "worker threads (0 = all cores)");
    run->add_option("--mc-validate", mc_samples, "re-evaluate SE under Monte-Carlo statistics with n samples");
    run->add_flag("--svg", svg, "also write cdf.svg");
    run->add_flag("--strict", strict, "exit 3 if any solve did not converge");
    run->add_flag("--debug-dump", debug_dump, "write link statistics and weights per setup");
    run->add_option("--estimator", estimator, "default estimator for schemes without a prefix (LMMSE or LS)");
    run->add_option("--partial-nd", partial_nd, "selected pairs for partial schemes (default L*K/2)");
    run->add_option("--eps-admm", solver.eps_admm, "inner consensus threshold");
    run->add_option("--eps-wmmse", solver.eps_wmmse, "outer improvement threshold");
    run->add_option("--rho-admm", solver.rho_admm, "ADMM penalty");
    run->add_option("--max-outer", solver.max_outer_iters, "outer iteration cap");
    run->add_option("--max-inner", solver.max_inner_iters, "inner iteration cap");
    const std::map<std::string, lsfp::AdmmRestart> restarts{{"warm", lsfp::AdmmRestart::WarmStart},
                                                      {"outer", lsfp::AdmmRestart::RandomEachOuter},
                                                      {"inner", lsfp::AdmmRestart::RandomEachInner}};
    run->add_option("--admm-restart", solver.restart,
                    "ADMM copy/dual seeding: warm (default), outer, or inner (re-randomized every inner step)")
        ->transform(CLI::CheckedTransformer(restarts, CLI::ignore_case));

    long samples = 10000;
    CLI::App *validate = app.add_subcommand("validate", "check closed-form link statistics against Monte Carlo");
    validate->add_option("--config", config_path, "scenario JSON")->required();
    validate->add_option("--samples", samples, "Monte-Carlo realizations")->required();
    validate->add_option("--threads", threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        const lsfp::ScenarioConfig config = lsfp::load_scenario_config(config_path);
        threads = thread_override(threads);

        if (*validate) {
            const auto rows = lsfp::validate_linkstats(config, samples, threads);
            bool ok = true;
            std::printf("%-6s %-42s %14s %12s  %s\n", "est", "quantity", "max error", "tolerance", "result");
            for (const auto &row : rows) {
                std::printf("%-6s %-42s %14.6g %12.6g  %s\n", row.estimator.c_str(), row.quantity.c_str(),
                            row.max_error, row.tolerance, row.pass ? "PASS" : "FAIL");
                ok = ok && row.pass;
            }
            return ok ? kExitOk : kExitFailure;
        }

        const lsfp::EstimatorKind kind = lsfp::estimator_from_string(estimator);
        lsfp::RunOptions options;
        options.threads = threads;
        options.solver = solver;
        options.mc_validate_samples = mc_samples;
        options.keep_debug = debug_dump;
        const auto specs = lsfp::parse_scheme_list(schemes, kind, partial_nd);
        const lsfp::ExperimentResult result = lsfp::run_experiment(config, specs, setups, seed, options);
        lsfp::emit_outputs(result, out_dir, svg);

        for (const auto &s : result.summaries)
            std::printf("%-28s median %.4f  p10 %.4f  mean %.4f  converged %d/%d\n", s.name.c_str(), s.median,
                        s.p10, s.mean, s.converged, s.converged + s.not_converged);
        if (strict && result.total_not_converged() > 0) {
            std::fprintf(stderr, "error: %d solves did not converge\n", result.total_not_converged());
            return kExitNonConvergence;
        }
        return kExitOk;
    } catch (const lsfp::ConfigError &e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
}
