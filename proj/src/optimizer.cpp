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

#include "lsfp/optimizer.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace lsfp {

std::string to_string(Objective objective)
{
    return objective == Objective::SumSE ? "SumSE" : "PropFair";
}

std::string to_string(PartialMethod method)
{
    return method == PartialMethod::DS ? "DS" : "DS_Int";
}

void SolverOptions::validate() const
{
    if (!(eps_admm > 0.0)) throw ConfigError("eps_admm", "must be > 0");
    if (!(eps_wmmse > 0.0)) throw ConfigError("eps_wmmse", "must be > 0");
    if (!(rho_admm > 0.0)) throw ConfigError("rho_admm", "must be > 0");
    if (max_outer_iters < 1) throw ConfigError("max_outer_iters", "must be >= 1");
    if (max_inner_iters < 1) throw ConfigError("max_inner_iters", "must be >= 1");
}

cd optimal_receiver_u(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2)
{
    const cd gain = weights.a(cell, user).dot(ls.b(cell, user));
    return gain / received_power(cell, user, weights, ls, sigma2);
}

double weight_update_d(Objective objective, double e)
{
    e = std::clamp(e, 1e-12, 1.0 - 1e-12);
    if (objective == Objective::SumSE) return 1.0 / e;
    return -1.0 / (e * std::log(e));
}

QuadraticForm build_quadratic(const std::vector<cd> &u, const std::vector<double> &d, const LinkStatistics &ls)
{
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    QuadraticForm q;
    q.num_cells = L;
    q.users_per_cell = K;
    q.omega_sqrt.resize(K);
    q.F.assign(K, CMat::Zero(L, L));
    q.f.assign(static_cast<std::size_t>(L) * K, CVec::Zero(L));

    for (int k = 0; k < K; ++k) {
        RVec &w = q.omega_sqrt[k];
        w.resize(L);
        for (int r = 0; r < L; ++r) w(r) = std::sqrt(ls.omega(r, k));
        const RVec inv = w.cwiseInverse();

        CMat &F = q.F[k];
        for (int r = 0; r < L; ++r)
            for (int kp = 0; kp < K; ++kp) {
                const std::size_t i = static_cast<std::size_t>(r) * K + kp;
                const double scale = d[i] * std::norm(u[i]);
                if (scale != 0.0) F.noalias() += scale * ls.c(r, kp, k);
            }
        F = inv.asDiagonal() * F * inv.asDiagonal();
        F = 0.5 * (F + F.adjoint()).eval();

        for (int l = 0; l < L; ++l) {
            const std::size_t i = static_cast<std::size_t>(l) * K + k;
            q.f_at(l, k) = (d[i] * std::conj(u[i])) * inv.cast<cd>().cwiseProduct(ls.b(l, k));
        }
    }
    return q;
}

double qcqp_objective(const QuadraticForm &q, const std::vector<CVec> &x)
{
    double total = 0.0;
    for (int l = 0; l < q.num_cells; ++l)
        for (int k = 0; k < q.users_per_cell; ++k) {
            const CVec &v = x[static_cast<std::size_t>(l) * q.users_per_cell + k];
            total += v.dot(q.F[k] * v).real() - 2.0 * q.f_at(l, k).dot(v).real();
        }
    return total;
}

std::vector<double> scaled_bs_power(const std::vector<CVec> &x, int num_cells, int users_per_cell)
{
    std::vector<double> power(num_cells, 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(num_cells) * users_per_cell; ++i)
        for (int bs = 0; bs < num_cells; ++bs) power[bs] += std::norm(x[i](bs));
    return power;
}

namespace {

using Pattern = std::vector<unsigned char>;

Pattern support_pattern(const SupportMask &mask, int l, int k)
{
    Pattern p(mask.num_cells());
    for (int r = 0; r < mask.num_cells(); ++r) p[r] = mask.allowed(l, k, r) ? 1 : 0;
    return p;
}

// (F_k + rho I) restricted to one support pattern, factored once.
struct RestrictedSolver {
    std::vector<int> support;
    Eigen::LLT<CMat> llt;
};

void project_per_bs(std::vector<CVec> &x, int num_cells, int users_per_cell, double rho_d)
{
    const std::vector<double> power = scaled_bs_power(x, num_cells, users_per_cell);
    for (int bs = 0; bs < num_cells; ++bs) {
        if (power[bs] <= rho_d) continue;
        const double scale = std::sqrt(rho_d / power[bs]);
        for (CVec &v : x) v(bs) *= scale;
    }
}

void random_copy(std::vector<CVec> &a_bar, std::vector<CVec> &a_hat, const SupportMask &mask, double rho_d,
                 Rng &rng)
{
    const int L = mask.num_cells();
    const int K = mask.users_per_cell();
    const double scale = std::sqrt(rho_d / (static_cast<double>(L) * K));
    a_bar.assign(static_cast<std::size_t>(L) * K, CVec::Zero(L));
    a_hat.assign(static_cast<std::size_t>(L) * K, CVec::Zero(L));
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
            for (int r = 0; r < L; ++r)
                if (mask.allowed(l, k, r)) a_bar[static_cast<std::size_t>(l) * K + k](r) = scale * complex_normal(rng);
    project_per_bs(a_bar, L, K, rho_d);
}

} // namespace

AdmmResult run_admm(const QuadraticForm &q, double rho_d, const SolverOptions &options, const SupportMask &mask,
                    std::vector<CVec> &a_bar, std::vector<CVec> &a_hat, Rng &rng)
{
    const int L = q.num_cells;
    const int K = q.users_per_cell;
    const std::size_t n = static_cast<std::size_t>(L) * K;
    const double rho = options.rho_admm;

    if (a_bar.size() != n || a_hat.size() != n) throw InvariantViolation("ADMM start vectors have the wrong size");

    std::vector<std::map<Pattern, RestrictedSolver>> cache(K);
    std::vector<const RestrictedSolver *> solver(n, nullptr);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            Pattern p = support_pattern(mask, l, k);
            auto it = cache[k].find(p);
            if (it == cache[k].end()) {
                RestrictedSolver s;
                for (int r = 0; r < L; ++r)
                    if (p[r]) s.support.push_back(r);
                const int m = static_cast<int>(s.support.size());
                CMat sub(m, m);
                for (int i = 0; i < m; ++i)
                    for (int j = 0; j < m; ++j) sub(i, j) = q.F[k](s.support[i], s.support[j]);
                sub.diagonal().array() += rho;
                s.llt.compute(sub);
                if (m > 0 && s.llt.info() != Eigen::Success)
                    throw NumericError("ADMM: factorization of F + rho I failed for pilot " + std::to_string(k));
                it = cache[k].emplace(std::move(p), std::move(s)).first;
            }
            solver[static_cast<std::size_t>(l) * K + k] = &it->second;
        }

    AdmmResult out;
    out.a_tilde.assign(n, CVec::Zero(L));
    std::vector<CVec> v(n, CVec::Zero(L));
    for (int j = 1; j <= options.max_inner_iters; ++j) {
        if (options.restart == AdmmRestart::RandomEachInner) random_copy(a_bar, a_hat, mask, rho_d, rng);

        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) {
                const std::size_t i = static_cast<std::size_t>(l) * K + k;
                const RestrictedSolver &s = *solver[i];
                CVec &x = out.a_tilde[i];
                x.setZero();
                const int m = static_cast<int>(s.support.size());
                if (m == 0) continue;
                CVec rhs(m);
                for (int t = 0; t < m; ++t) {
                    const int r = s.support[t];
                    rhs(t) = q.f_at(l, k)(r) + rho * (a_bar[i](r) + a_hat[i](r));
                }
                const CVec sol = s.llt.solve(rhs);
                for (int t = 0; t < m; ++t) x(s.support[t]) = sol(t);
            }

        for (std::size_t i = 0; i < n; ++i) v[i] = out.a_tilde[i] - a_hat[i];
        project_per_bs(v, L, K, rho_d);

        double gap = 0.0;
        double norm = 0.0;
        double moved = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            moved += (v[i] - a_bar[i]).squaredNorm();
            a_bar[i] = v[i];
            a_hat[i] += a_bar[i] - out.a_tilde[i];
            gap += (a_bar[i] - out.a_tilde[i]).squaredNorm();
            norm += out.a_tilde[i].squaredNorm();
        }
        out.residual = norm > 0.0 ? gap / norm : gap;
        out.residual_trace.push_back(out.residual);
        out.iterations = j;
        // consensus gap and copy drift both below eps
        const double drift = norm > 0.0 ? moved / norm : moved;
        const bool settled = options.restart == AdmmRestart::RandomEachInner || drift <= options.eps_admm;
        if (out.residual <= options.eps_admm && settled) {
            out.converged = true;
            break;
        }
    }
    return out;
}

std::vector<CVec> admm_qcqp_solve(const QuadraticForm &q, double rho_d, const SolverOptions &options,
                                  const SupportMask &mask)
{
    options.validate();
    const std::size_t n = static_cast<std::size_t>(q.num_cells) * q.users_per_cell;
    std::vector<CVec> a_bar(n, CVec::Zero(q.num_cells));
    std::vector<CVec> a_hat(n, CVec::Zero(q.num_cells));
    Rng rng(options.seed);
    AdmmResult r = run_admm(q, rho_d, options, mask, a_bar, a_hat, rng);
    if (!r.converged)
        throw NonConvergenceError("ADMM reached max_inner_iters without consensus", r.residual, r.iterations);
    project_per_bs(r.a_tilde, q.num_cells, q.users_per_cell, rho_d);
    return std::move(r.a_tilde);
}

bool is_degenerate_user(int cell, int user, const LinkStatistics &ls, const SupportMask &mask)
{
    const CVec &b = ls.b(cell, user);
    for (int r = 0; r < ls.num_cells(); ++r)
        if (mask.allowed(cell, user, r) && b(r) != cd(0.0)) return false;
    return true;
}

double objective_value(Objective objective, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2)
{
    double total = 0.0;
    for (int l = 0; l < weights.num_cells(); ++l)
        for (int k = 0; k < weights.users_per_cell(); ++k) {
            const double rate = std::log2(1.0 + sinr_breakdown(l, k, weights, ls, sigma2).sinr);
            if (objective == Objective::SumSE)
                total += rate;
            else if (!is_degenerate_user(l, k, ls, weights.mask()))
                total += rate > 0.0 ? std::log(rate) : -std::numeric_limits<double>::infinity();
        }
    return total;
}

LsfpWeights initial_weights(const LinkStatistics &ls, const ScenarioConfig &config, const SupportMask &mask)
{
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    LsfpWeights w(mask);
    for (int bs = 0; bs < L; ++bs) {
        double load = 0.0;
        for (int k = 0; k < K; ++k) {
            if (!(ls.omega(bs, k) > 0.0)) throw InvariantViolation("initial_weights: omega must be positive");
            int count = 0;
            for (int r = 0; r < L; ++r) count += mask.allowed(r, k, bs) ? 1 : 0;
            load += ls.omega(bs, k) * count;
        }
        if (load == 0.0) throw ConfigError("mask", "BS " + std::to_string(bs) + " has no supported entries");
        const double value = std::sqrt(config.max_bs_power / load);
        for (int r = 0; r < L; ++r)
            for (int k = 0; k < K; ++k)
                if (mask.allowed(r, k, bs)) w.a(r, k)(bs) = value;
    }
    return w;
}

namespace {

void to_weights(const QuadraticForm &q, const std::vector<CVec> &x, LsfpWeights &w)
{
    for (int l = 0; l < q.num_cells; ++l)
        for (int k = 0; k < q.users_per_cell; ++k)
            w.a(l, k) = x[static_cast<std::size_t>(l) * q.users_per_cell + k].cwiseQuotient(
                q.omega_sqrt[k].cast<cd>());
    w.apply_mask();
}

void project_weights(LsfpWeights &w, const LinkStatistics &ls, double rho_d)
{
    for (int bs = 0; bs < w.num_cells(); ++bs) {
        const double p = power_used(bs, w, ls);
        if (p <= rho_d) continue;
        const double scale = std::sqrt(rho_d / p);
        for (int l = 0; l < w.num_cells(); ++l)
            for (int k = 0; k < w.users_per_cell(); ++k) w.a(l, k)(bs) *= scale;
    }
}

LsfpWeights blend(const LsfpWeights &from, const LsfpWeights &to, double t)
{
    LsfpWeights out = from;
    for (int l = 0; l < from.num_cells(); ++l)
        for (int k = 0; k < from.users_per_cell(); ++k) out.a(l, k) += t * (to.a(l, k) - from.a(l, k));
    return out;
}

} // namespace

WmmseResult wmmse_solve(const LinkStatistics &ls, const ScenarioConfig &config, const SolverOptions &options,
                        const SupportMask &mask, const LsfpWeights *start)
{
    options.validate();
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    if (mask.num_cells() != L || mask.users_per_cell() != K)
        throw InvariantViolation("wmmse_solve: mask dimensions do not match the link statistics");
    const double sigma2 = config.noise_power;
    const double rho_d = config.max_bs_power;
    const std::size_t n = static_cast<std::size_t>(L) * K;

    WmmseResult result;
    SolverDiagnostics &diag = result.diagnostics;
    diag.objective = options.objective;

    LsfpWeights current = initial_weights(ls, config, mask);
    if (start) {
        if (start->num_cells() != L || start->users_per_cell() != K)
            throw InvariantViolation("wmmse_solve: start weights have the wrong dimensions");
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) current.a(l, k) = start->a(l, k);
        current.apply_mask();
        project_weights(current, ls, rho_d);
    }

    std::vector<unsigned char> degenerate(n, 0);
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k)
            if (is_degenerate_user(l, k, ls, mask)) {
                degenerate[static_cast<std::size_t>(l) * K + k] = 1;
                ++diag.degenerate_users;
            }

    double objective = objective_value(options.objective, current, ls, sigma2);
    diag.objective_trace.push_back(objective);

    Rng rng(options.seed);
    SolverState state;
    state.u.assign(n, cd(0.0));
    state.d.assign(n, 1.0);
    state.e.assign(n, 1.0);
    double previous_log_d = 0.0;

    for (int it = 1; it <= options.max_outer_iters; ++it) {
        double log_d = 0.0;
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) {
                const std::size_t i = static_cast<std::size_t>(l) * K + k;
                if (degenerate[i]) {
                    state.u[i] = 0.0;
                    state.e[i] = 1.0;
                    state.d[i] = 1.0;
                    continue;
                }
                state.u[i] = optimal_receiver_u(l, k, current, ls, sigma2);
                state.e[i] = mse_value(state.u[i], l, k, current, ls, sigma2);
                state.d[i] = weight_update_d(options.objective, state.e[i]);
                log_d += std::log2(state.d[i]);
            }

        state.quad = build_quadratic(state.u, state.d, ls);
        if (it == 1 || options.restart != AdmmRestart::WarmStart) random_copy(state.a_bar, state.a_hat, mask, rho_d, rng);
        AdmmResult inner = run_admm(state.quad, rho_d, options, mask, state.a_bar, state.a_hat, rng);
        diag.inner_iterations.push_back(inner.iterations);
        diag.inner_residuals.push_back(inner.residual);
        if (!inner.converged) ++diag.inner_nonconverged;
        state.a_tilde = std::move(inner.a_tilde);

        LsfpWeights next(mask);
        to_weights(state.quad, state.a_tilde, next);
        project_weights(next, ls, rho_d);
        double next_objective = objective_value(options.objective, next, ls, sigma2);

        if (options.monotone_safeguard && !(next_objective >= objective)) {
            bool accepted = false;
            double t = 0.5;
            for (int step = 0; step < 40 && !accepted; ++step, t *= 0.5) {
                ++diag.backtracks;
                LsfpWeights trial = blend(current, next, t);
                const double trial_objective = objective_value(options.objective, trial, ls, sigma2);
                if (trial_objective >= objective) {
                    next = std::move(trial);
                    next_objective = trial_objective;
                    accepted = true;
                }
            }
            if (!accepted) {
                next = current;
                next_objective = objective;
            }
        }
        current = std::move(next);
        objective = next_objective;
        diag.objective_trace.push_back(objective);
        diag.outer_iterations = it;

        if (it > 1) {
            const double change = log_d - previous_log_d;
            const double ratio = previous_log_d != 0.0 ? (change * change) / (previous_log_d * previous_log_d)
                                                       : change * change;
            if (ratio <= options.eps_wmmse) {
                diag.converged = true;
                break;
            }
        }
        previous_log_d = log_d;
    }

    result.weights = std::move(current);
    return result;
}

nlohmann::json diagnostics_to_json(const SolverDiagnostics &diag)
{
    nlohmann::json j;
    j["objective"] = to_string(diag.objective);
    j["converged"] = diag.converged;
    j["outer_iterations"] = diag.outer_iterations;
    j["objective_trace"] = diag.objective_trace;
    j["inner_iterations"] = diag.inner_iterations;
    j["inner_residuals"] = diag.inner_residuals;
    j["inner_nonconverged"] = diag.inner_nonconverged;
    j["backtracks"] = diag.backtracks;
    j["degenerate_users"] = diag.degenerate_users;
    return j;
}

SupportMask PartialSelection::mask(int num_cells, int users_per_cell) const
{
    SupportMask m = SupportMask::single_layer(num_cells, users_per_cell);
    for (const auto &[l, k] : pairs)
        for (int r = 0; r < num_cells; ++r) m.set(l, k, r, true);
    return m;
}

PartialSelection select_partial_indices(PartialMethod method, const LinkStatistics &ls, int n_d)
{
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    if (n_d < 0 || n_d > L * K) throw ConfigError("partial_nd", "must lie in [0, L*K]");

    struct Entry {
        double metric;
        int l;
        int k;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(L) * K);

    if (method == PartialMethod::DS) {
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) {
                const CVec &b = ls.b(l, k);
                const double total = b.squaredNorm();
                entries.push_back({total > 0.0 ? std::norm(b(l)) / total : 1.0, l, k});
            }
    } else {
        for (int k = 0; k < K; ++k) {
            CMat sum = CMat::Zero(L, L);
            for (int r = 0; r < L; ++r)
                for (int kp = 0; kp < K; ++kp) sum += ls.c(r, kp, k);
            Eigen::LLT<CMat> llt(sum);
            if (llt.info() != Eigen::Success)
                throw NumericError("select_partial_indices: summed C matrix for pilot " + std::to_string(k) +
                                   " is not positive definite");
            for (int l = 0; l < L; ++l) {
                const CVec a = llt.solve(ls.b(l, k));
                const double total = a.squaredNorm();
                entries.push_back({total > 0.0 ? std::norm(a(l)) / total : 1.0, l, k});
            }
        }
    }

    std::sort(entries.begin(), entries.end(), [](const Entry &x, const Entry &y) {
        if (x.metric != y.metric) return x.metric < y.metric;
        if (x.l != y.l) return x.l < y.l;
        return x.k < y.k;
    });

    PartialSelection out;
    for (int i = 0; i < n_d; ++i) out.pairs.emplace_back(entries[i].l, entries[i].k);
    std::sort(out.pairs.begin(), out.pairs.end());
    return out;
}

LsfpWeights lpa_weights(const LinkStatistics &ls, const ScenarioConfig &config)
{
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    LsfpWeights w(SupportMask::single_layer(L, K));
    for (int l = 0; l < L; ++l) {
        double share = 0.0;
        for (int k = 0; k < K; ++k) share += std::sqrt(ls.omega(l, k));
        for (int k = 0; k < K; ++k) {
            const double omega = ls.omega(l, k);
            w.a(l, k)(l) = std::sqrt(config.max_bs_power * std::sqrt(omega) / (omega * share));
        }
    }
    return w;
}

} // namespace lsfp
