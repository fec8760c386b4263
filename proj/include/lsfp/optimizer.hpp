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

#ifndef LSFP_OPTIMIZER_HPP
#define LSFP_OPTIMIZER_HPP

#include "lsfp/common.hpp"
#include "lsfp/linkstats.hpp"
#include "lsfp/scenario.hpp"
#include "lsfp/se_eval.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace lsfp {

enum class Objective { SumSE, PropFair };

std::string to_string(Objective objective);

/// How the consensus copy and dual variable are seeded for each inner solve.
enum class AdmmRestart {
    WarmStart,       // random on the first outer iteration, then carried over
    RandomEachOuter, // random copy, zero dual at every outer iteration
    RandomEachInner, // re-randomized before every inner iteration
};

struct SolverOptions {
    Objective objective = Objective::SumSE;
    double eps_admm = 1e-5;
    double eps_wmmse = 1e-5;
    double rho_admm = 0.2;
    int max_outer_iters = 500;
    int max_inner_iters = 5000;
    AdmmRestart restart = AdmmRestart::WarmStart;
    std::uint64_t seed = 0;
    /// Step back toward the previous iterate whenever an update lowers the objective.
    bool monotone_safeguard = true;

    void validate() const;
};

/// Per-pilot inner problem: minimize sum_{l,k} x_lk^H F_k x_lk - 2 Re(f_lk^H x_lk)
/// subject to the per-BS power budget, in scaled coordinates x_lk = diag(omega_sqrt_k) a_lk.
struct QuadraticForm {
    int num_cells = 0;
    int users_per_cell = 0;
    std::vector<RVec> omega_sqrt; // per pilot k, entry r = sqrt(omega(r, k))
    std::vector<CMat> F;          // per pilot k
    std::vector<CVec> f;          // per (l, k), index l * K + k

    CVec &f_at(int l, int k) { return f[static_cast<std::size_t>(l) * users_per_cell + k]; }
    const CVec &f_at(int l, int k) const { return f[static_cast<std::size_t>(l) * users_per_cell + k]; }
};

/// Everything the block coordinate descent carries between steps. Vectors
/// indexed by (l, k) use l * K + k.
struct SolverState {
    std::vector<cd> u;
    std::vector<double> d;
    std::vector<double> e;
    std::vector<CVec> a_tilde;
    std::vector<CVec> a_bar;
    std::vector<CVec> a_hat;
    QuadraticForm quad;
};

cd optimal_receiver_u(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2);

/// MSE weight for the given objective; e is clamped into [1e-12, 1 - 1e-12].
double weight_update_d(Objective objective, double e);

QuadraticForm build_quadratic(const std::vector<cd> &u, const std::vector<double> &d, const LinkStatistics &ls);

double qcqp_objective(const QuadraticForm &q, const std::vector<CVec> &x);

/// Per-BS power sum_{r,k} |x_rk^bs|^2 in scaled coordinates.
std::vector<double> scaled_bs_power(const std::vector<CVec> &x, int num_cells, int users_per_cell);

struct AdmmResult {
    std::vector<CVec> a_tilde;
    int iterations = 0;
    double residual = 0.0;
    bool converged = false;
    std::vector<double> residual_trace;
};

/// Consensus ADMM on `q`. `a_bar` and `a_hat` are the starting copy and dual
/// and are updated in place. `rng` is only drawn from under RandomEachInner.
AdmmResult run_admm(const QuadraticForm &q, double rho_d, const SolverOptions &options, const SupportMask &mask,
                    std::vector<CVec> &a_bar, std::vector<CVec> &a_hat, Rng &rng);

/// Solves the inner problem from a zero start. Throws NonConvergenceError
/// when max_inner_iters is reached.
std::vector<CVec> admm_qcqp_solve(const QuadraticForm &q, double rho_d, const SolverOptions &options,
                                  const SupportMask &mask);

/// True when b(cell, user) vanishes on the supported entries.
bool is_degenerate_user(int cell, int user, const LinkStatistics &ls, const SupportMask &mask);

/// sum log2(1 + SINR) for SumSE; sum ln(log2(1 + SINR)) over non-degenerate users for PropFair.
double objective_value(Objective objective, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2);

/// Same value on every supported entry of BS l, chosen so each BS spends exactly rho_d.
LsfpWeights initial_weights(const LinkStatistics &ls, const ScenarioConfig &config, const SupportMask &mask);

struct SolverDiagnostics {
    Objective objective = Objective::SumSE;
    std::vector<double> objective_trace; // entry 0 is the starting point
    std::vector<int> inner_iterations;
    std::vector<double> inner_residuals;
    int outer_iterations = 0;
    int inner_nonconverged = 0;
    int backtracks = 0;
    int degenerate_users = 0;
    bool converged = false;
};

struct WmmseResult {
    LsfpWeights weights;
    SolverDiagnostics diagnostics;
};

WmmseResult wmmse_solve(const LinkStatistics &ls, const ScenarioConfig &config, const SolverOptions &options,
                        const SupportMask &mask, const LsfpWeights *start = nullptr);

nlohmann::json diagnostics_to_json(const SolverDiagnostics &diag);

enum class PartialMethod { DS, DS_Int };

std::string to_string(PartialMethod method);

struct PartialSelection {
    std::vector<std::pair<int, int>> pairs; // (cell, user), lexicographic
    int count() const { return static_cast<int>(pairs.size()); }

    /// Full support for the selected pairs, own BS only for the rest.
    SupportMask mask(int num_cells, int users_per_cell) const;
};

PartialSelection select_partial_indices(PartialMethod method, const LinkStatistics &ls, int n_d);

/// Single-layer power split proportional to sqrt(omega) at each BS.
LsfpWeights lpa_weights(const LinkStatistics &ls, const ScenarioConfig &config);

} // namespace lsfp

#endif
