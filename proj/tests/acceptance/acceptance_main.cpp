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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "lsfp/config_io.hpp"
#include "lsfp/estimation.hpp"
#include "lsfp/harness.hpp"
#include "lsfp/linkstats.hpp"
#include "lsfp/optimizer.hpp"
#include "lsfp/scenario.hpp"
#include "lsfp/se_eval.hpp"

#include "test_support.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace lsfp;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr long kMomentDraws = 1000000;
constexpr double kMomentTol = 0.01;
constexpr double kMomentSeconds = 60.0;

constexpr long kLinkSamples = 100000;
constexpr double kLinkSeconds = 300.0;

constexpr double kMseTol = 1e-10;
constexpr double kWeightTol = 1e-8;

constexpr double kAdmmObjectiveTol = 1e-6;
constexpr double kAdmmViolationTol = 1e-9;
constexpr long kGradientIterations = 1000000;
constexpr double kAdmmSeconds = 60.0;

constexpr double kMonotoneSlack = 1e-9;
constexpr double kConvergedFraction = 0.95;

constexpr double kGridTol = 1e-3;
constexpr double kGridEpsWmmse = 1e-12;

constexpr double kOrderFraction = 0.95;
constexpr double kPartialBand = 0.02;
constexpr double kQualitativeSeconds = 1800.0;

constexpr double kPowerSlack = 1e-6;

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char *pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
    return buf;
}

double rel(double value, double reference)
{
    return std::abs(value - reference) / std::abs(reference);
}

// --- 1: moment identities ------------------------------------------------------

Verdict moment_identities()
{
    const auto t0 = Clock::now();
    const int M = 4;
    Rng rng(101);
    double worst = 0.0;
    for (int inst = 0; inst < 5; ++inst) {
        const CMat a = test::random_psd(M, rng);
        const CMat b = test::random_matrix(M, M, rng);
        const CMat root = hermitian_sqrt(a);
        double sum = 0.0;
        for (long i = 0; i < kMomentDraws; ++i) {
            const CVec u = root * complex_normal_vector(M, rng);
            sum += std::norm(u.dot(b * u));
        }
        worst = std::max(worst, rel(sum / kMomentDraws, quadratic_moment(a, b)));
    }
    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    for (int inst = 0; inst < 5; ++inst) {
        const CMat a = test::random_psd(M, rng);
        const CVec xbar = complex_normal_vector(M, rng);
        const CMat b = test::random_matrix(M, M, rng);
        const CMat cz = test::random_psd(M, rng, 0.5);
        const CMat cy = b * (a + xbar * xbar.adjoint()) * b.adjoint() + cz;
        const RicianMoments cf = rician_moments(a, xbar, b, cy);
        const CMat ra = hermitian_sqrt(a);
        const CMat rz = hermitian_sqrt(cz);
        cd first = 0.0;
        double second = 0.0;
        for (long i = 0; i < kMomentDraws; ++i) {
            const CVec x = std::polar(1.0, phase(rng)) * xbar + ra * complex_normal_vector(M, rng);
            const CVec y = b * x + rz * complex_normal_vector(M, rng);
            const cd v = y.dot(x);
            first += v;
            second += std::norm(v);
        }
        first /= static_cast<double>(kMomentDraws);
        second /= static_cast<double>(kMomentDraws);
        worst = std::max(worst, std::abs(first - cf.first) / std::abs(cf.first));
        worst = std::max(worst, rel(second, cf.second));
    }
    const double elapsed = seconds_since(t0);
    return {worst <= kMomentTol && elapsed < kMomentSeconds,
            fmt("max rel err %.3g (tol %.3g), %.1f s", worst, kMomentTol, elapsed)};
}

// --- 2: closed-form link statistics against Monte Carlo ----------------------

ScenarioConfig compact_pair_config()
{
    ScenarioConfig c = test::small_config(2, 2, 4, 1);
    c.fading = FadingKind::RicianCorrelated;
    return c;
}

Verdict linkstats_oracle()
{
    const auto t0 = Clock::now();
    const std::vector<ValidationRow> rows = validate_linkstats(compact_pair_config(), kLinkSamples, 0);
    bool ok = true;
    std::ostringstream detail;
    for (const ValidationRow &r : rows) {
        ok = ok && r.pass;
        if (!r.pass) detail << r.estimator << " " << r.quantity << " " << r.max_error << " > " << r.tolerance << "; ";
    }
    double b_worst = 0.0, c_worst = 0.0;
    for (const ValidationRow &r : rows) {
        if (r.quantity == "b") b_worst = std::max(b_worst, r.max_error);
        if (r.quantity == "C") c_worst = std::max(c_worst, r.max_error);
    }
    const double elapsed = seconds_since(t0);
    detail << fmt("b %.3g, C %.3g, %.1f s", b_worst, c_worst, elapsed);
    return {ok && elapsed < kLinkSeconds, detail.str()};
}

// --- 3: WMMSE identities ---------------------------------------------------

LsfpWeights random_weights(int L, int K, Rng &rng)
{
    LsfpWeights w(SupportMask::full(L, K));
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) w.a(l, k) = complex_normal_vector(L, rng);
    return w;
}

Verdict wmmse_identities()
{
    Rng rng(303);
    double e_worst = 0.0, d_worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        const int L = 2 + inst % 3;
        const int K = 1 + inst % 3;
        const LinkStatistics ls = test::random_linkstats(L, K, rng);
        const LsfpWeights w = random_weights(L, K, rng);
        const double sigma2 = 0.1 + inst * 0.01;
        for (int l = 0; l < L; ++l)
            for (int k = 0; k < K; ++k) {
                const double sinr = sinr_breakdown(l, k, w, ls, sigma2).sinr;
                const cd u = optimal_receiver_u(l, k, w, ls, sigma2);
                const double e = mse_value(u, l, k, w, ls, sigma2);
                const double d = weight_update_d(Objective::SumSE, e);
                e_worst = std::max(e_worst, rel(e, 1.0 / (1.0 + sinr)));
                d_worst = std::max(d_worst, rel(d, 1.0 + sinr));
            }
    }
    return {e_worst <= kMseTol && d_worst <= kWeightTol,
            fmt("e rel err %.3g (tol %.3g), d rel err %.3g (tol %.3g)", e_worst, kMseTol, d_worst, kWeightTol)};
}

// --- 4: ADMM against projected gradient ------------------------------------

Verdict admm_optimality()
{
    const auto t0 = Clock::now();
    Rng rng(404);
    SolverOptions o;
    o.eps_admm = 1e-14;
    o.max_inner_iters = 1000000;
    double obj_worst = 0.0, viol_worst = 0.0;
    for (int inst = 0; inst < 20; ++inst) {
        const int L = 2 + inst % 3;
        const int K = 2;
        const double rho_d = 1.0;
        const QuadraticForm q = test::random_quadratic(L, K, rng, 2.0);
        const SupportMask mask = SupportMask::full(L, K);
        const std::vector<CVec> x = admm_qcqp_solve(q, rho_d, o, mask);
        const std::vector<CVec> oracle = test::projected_gradient(q, mask, rho_d, kGradientIterations, o.rho_admm);
        obj_worst = std::max(obj_worst, rel(qcqp_objective(q, x), qcqp_objective(q, oracle)));
        viol_worst = std::max(viol_worst, test::power_violation(x, L, K, rho_d));
    }
    const double elapsed = seconds_since(t0);
    return {obj_worst <= kAdmmObjectiveTol && viol_worst <= kAdmmViolationTol && elapsed < kAdmmSeconds,
            fmt("objective rel err %.3g (tol %.3g), violation %.3g (tol %.3g)", obj_worst, kAdmmObjectiveTol,
                viol_worst, kAdmmViolationTol) +
                fmt(", %.1f s", elapsed)};
}

// --- 5: monotone ascent ----------------------------------------------------

Verdict monotone_ascent()
{
    int runs = 0, converged = 0, violations = 0;
    double worst_drop = 0.0;
    for (int inst = 0; inst < 50; ++inst) {
        ScenarioConfig c = test::small_config(2 + inst % 3, 2, 8, 500 + inst);
        const ChannelStatistics stats = generate_network(c);
        const PilotStatistics pilots(stats, c);
        const EstimatorKind kind = inst % 2 == 0 ? EstimatorKind::LMMSE : EstimatorKind::LS;
        const LinkStatistics ls = closed_form_linkstats(kind, stats, pilots, c);
        for (Objective obj : {Objective::SumSE, Objective::PropFair}) {
            SolverOptions o;
            o.objective = obj;
            o.seed = 7000 + inst;
            const WmmseResult r = wmmse_solve(ls, c, o, SupportMask::full(c.num_cells, c.users_per_cell));
            ++runs;
            converged += r.diagnostics.converged ? 1 : 0;
            const auto &trace = r.diagnostics.objective_trace;
            for (std::size_t i = 1; i < trace.size(); ++i) {
                const double drop = trace[i - 1] - trace[i];
                worst_drop = std::max(worst_drop, drop);
                if (drop > kMonotoneSlack) ++violations;
            }
        }
    }
    const double fraction = static_cast<double>(converged) / runs;
    return {violations == 0 && fraction >= kConvergedFraction,
            fmt("largest drop %.3g (slack %.3g), converged %.0f/%.0f", worst_drop, kMonotoneSlack, converged, runs)};
}

// --- 6: tiny-scale global check --------------------------------------------

// Sum of log2(1 + SINR) for L = 2, K = 1 with real statistics and real weights
// x (user in cell 0) and y (user in cell 1).
struct RealPair {
    Eigen::Vector2d b[2];
    Eigen::Matrix2d c[2];
    double omega[2];
    double rho_d;
    double sigma2;

    double sum_rate(const Eigen::Vector2d &x, const Eigen::Vector2d &y) const
    {
        double total = 0.0;
        const Eigen::Vector2d *own[2] = {&x, &y};
        for (int l = 0; l < 2; ++l) {
            const double signal = std::pow(own[l]->dot(b[l]), 2);
            const double received = x.dot(c[l] * x) + y.dot(c[l] * y) + sigma2;
            total += std::log2(received / (received - signal));
        }
        return total;
    }

    // Per BS n: power fraction t_n in [0, 1] and split angle phi_n.
    double at(const std::array<double, 4> &p) const
    {
        Eigen::Vector2d x, y;
        for (int n = 0; n < 2; ++n) {
            const double t = std::clamp(p[2 * n], 0.0, 1.0);
            const double amp = std::sqrt(rho_d * t / omega[n]);
            x(n) = amp * std::cos(p[2 * n + 1]);
            y(n) = amp * std::sin(p[2 * n + 1]);
        }
        return sum_rate(x, y);
    }
};

double grid_search(const RealPair &pair)
{
    const int coarse = 40;
    struct Seed {
        double value;
        std::array<double, 4> p;
    };
    std::vector<Seed> seeds;
    for (int i0 = 0; i0 <= coarse; ++i0)
        for (int i1 = 0; i1 < coarse; ++i1)
            for (int i2 = 0; i2 <= coarse; ++i2)
                for (int i3 = 0; i3 < coarse; ++i3) {
                    const std::array<double, 4> p{double(i0) / coarse, 2.0 * kPi * i1 / coarse, double(i2) / coarse,
                                                  2.0 * kPi * i3 / coarse};
                    seeds.push_back({pair.at(p), p});
                }
    std::partial_sort(seeds.begin(), seeds.begin() + 20, seeds.end(),
                      [](const Seed &a, const Seed &b) { return a.value > b.value; });

    double best = seeds.front().value;
    const int fine = 9;
    for (int s = 0; s < 20; ++s) {
        std::array<double, 4> centre = seeds[s].p;
        double value = seeds[s].value;
        std::array<double, 4> half{1.0 / coarse, 2.0 * kPi / coarse, 1.0 / coarse, 2.0 * kPi / coarse};
        for (int round = 0; round < 40; ++round) {
            std::array<double, 4> next = centre;
            for (int i0 = 0; i0 < fine; ++i0)
                for (int i1 = 0; i1 < fine; ++i1)
                    for (int i2 = 0; i2 < fine; ++i2)
                        for (int i3 = 0; i3 < fine; ++i3) {
                            const int idx[4] = {i0, i1, i2, i3};
                            std::array<double, 4> p;
                            for (int d = 0; d < 4; ++d)
                                p[d] = centre[d] + half[d] * (2.0 * idx[d] / (fine - 1) - 1.0);
                            p[0] = std::clamp(p[0], 0.0, 1.0);
                            p[2] = std::clamp(p[2], 0.0, 1.0);
                            const double v = pair.at(p);
                            if (v > value) {
                                value = v;
                                next = p;
                            }
                        }
            centre = next;
            for (double &h : half) h *= 0.5;
        }
        best = std::max(best, value);
    }
    return best;
}

Verdict tiny_global()
{
    double worst = 0.0;
    double imag_worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        ScenarioConfig c = test::small_config(2, 1, 8, seed);
        c.fading = FadingKind::RayleighUncorrelated;
        const ChannelStatistics stats = generate_network(c);
        const PilotStatistics pilots(stats, c);
        const LinkStatistics ls = closed_form_linkstats(EstimatorKind::LMMSE, stats, pilots, c);

        RealPair pair;
        pair.rho_d = c.max_bs_power;
        pair.sigma2 = c.noise_power;
        for (int l = 0; l < 2; ++l) {
            pair.b[l] = ls.b(l, 0).real();
            pair.c[l] = ls.c(l, 0, 0).real();
            pair.omega[l] = ls.omega(l, 0);
            imag_worst = std::max(imag_worst, ls.b(l, 0).imag().cwiseAbs().maxCoeff() / ls.b(l, 0).norm());
            imag_worst = std::max(imag_worst, ls.c(l, 0, 0).imag().cwiseAbs().maxCoeff() /
                                                  ls.c(l, 0, 0).cwiseAbs().maxCoeff());
        }

        SolverOptions o;
        o.seed = seed;
        o.eps_wmmse = kGridEpsWmmse;
        const WmmseResult r = wmmse_solve(ls, c, o, SupportMask::full(2, 1));
        const double solved = objective_value(Objective::SumSE, r.weights, ls, c.noise_power);
        worst = std::max(worst, rel(solved, grid_search(pair)));
    }
    return {worst <= kGridTol && imag_worst <= 1e-12,
            fmt("max rel gap to grid optimum %.3g (tol %.3g), eps_wmmse %.0e, imag part %.1e", worst, kGridTol,
                kGridEpsWmmse, imag_worst)};
}

// --- 7 and 8: qualitative ordering and feasibility -----------------------------

ScenarioConfig desk_config(FadingKind fading)
{
    ScenarioConfig c;
    c.num_cells = 4;
    c.users_per_cell = 4;
    c.antennas = 32;
    c.pilot_length = 4;
    c.coherence_length = 200;
    c.fading = fading;
    c.seed = 1;
    return c;
}

const SchemeSummary &summary_of(const ExperimentResult &r, const std::string &name)
{
    for (const SchemeSummary &s : r.summaries)
        if (s.name == name) return s;
    throw std::runtime_error("missing scheme " + name);
}

std::size_t scheme_index(const ExperimentResult &r, const std::string &name)
{
    for (std::size_t i = 0; i < r.schemes.size(); ++i)
        if (r.schemes[i].name == name) return i;
    throw std::runtime_error("missing scheme " + name);
}

double setup_sum(const ExperimentResult &r, int setup, std::size_t scheme)
{
    double total = 0.0;
    for (double v : r.setups[setup].schemes[scheme].se) total += v;
    return total;
}

double max_power_ratio(const ExperimentResult &r)
{
    double worst = 0.0;
    for (const SchemeSummary &s : r.summaries) worst = std::max(worst, s.max_power_ratio);
    return worst;
}

Verdict qualitative(double &power_ratio)
{
    const auto t0 = Clock::now();
    const int n_setups = 50;
    const std::uint64_t seed = 2024;

    const ExperimentResult rayleigh = run_experiment(desk_config(FadingKind::RayleighUncorrelated),
                                                     parse_scheme_list("LSFP-SumSE,SLP-SumSE"), n_setups, seed);
    const std::size_t lsfp_i = scheme_index(rayleigh, "LSFP-SumSE");
    const std::size_t slp_i = scheme_index(rayleigh, "SLP-SumSE");
    int wins = 0;
    for (int s = 0; s < n_setups; ++s)
        wins += setup_sum(rayleigh, s, lsfp_i) >= setup_sum(rayleigh, s, slp_i) ? 1 : 0;
    const bool a = wins >= kOrderFraction * n_setups;

    const ExperimentResult rician =
        run_experiment(desk_config(FadingKind::RicianCorrelated),
                       parse_scheme_list("LSFP-SumSE,LSFP-PropFair,SLP-SumSE,P-DS-LSFP-SumSE"), n_setups, seed);
    const SchemeSummary &sum = summary_of(rician, "LSFP-SumSE");
    const SchemeSummary &pf = summary_of(rician, "LSFP-PropFair");
    const SchemeSummary &slp = summary_of(rician, "SLP-SumSE");
    const SchemeSummary &partial = summary_of(rician, "P-DS-LSFP-SumSE");
    const bool b = pf.p10 >= sum.p10;
    const bool c = sum.median >= pf.median;
    const double lo = std::min(slp.sum_se, sum.sum_se) * (1.0 - kPartialBand);
    const double hi = std::max(slp.sum_se, sum.sum_se) * (1.0 + kPartialBand);
    const bool d = partial.sum_se >= lo && partial.sum_se <= hi;

    power_ratio = std::max(max_power_ratio(rayleigh), max_power_ratio(rician));
    const double elapsed = seconds_since(t0);
    std::ostringstream detail;
    detail << "(a) " << (a ? "ok" : "FAIL") << " " << wins << "/" << n_setups << " setups"
           << "; (b) " << (b ? "ok" : "FAIL")
           << fmt(" p10 PF %.4g vs SumSE %.4g", pf.p10, sum.p10) << "; (c) " << (c ? "ok" : "FAIL")
           << fmt(" median SumSE %.4g vs PF %.4g", sum.median, pf.median) << "; (d) " << (d ? "ok" : "FAIL")
           << fmt(" sum SE SLP %.5g <= P-DS %.5g <= LSFP %.5g", slp.sum_se, partial.sum_se, sum.sum_se)
           << fmt("; %.1f s", elapsed);
    return {a && b && c && d && elapsed < kQualitativeSeconds, detail.str()};
}

// --- 9 (and CLI half of 8): determinism through the command-line tool -------

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string &cli, const fs::path &config, const fs::path &out, int threads)
{
    const std::string cmd = "\"" + cli + "\" run --config \"" + config.string() +
                            "\" --schemes LSFP-SumSE,LSFP-PropFair,SLP-SumSE,P-DS-LSFP-SumSE,P-DS+Int-LSFP-SumSE,"
                            "LS:LSFP-SumSE,LPA --setups 6 --seed 77 --threads " +
                            std::to_string(threads) + " --out \"" + out.string() + "\" > /dev/null";
    return std::system(cmd.c_str());
}

Verdict determinism(const std::string &cli, const fs::path &work, double &cli_power_ratio)
{
    fs::remove_all(work);
    fs::create_directories(work);
    const fs::path config = work / "desk.json";
    {
        std::ofstream out(config);
        out << scenario_to_json(desk_config(FadingKind::RicianCorrelated)).dump(2) << "\n";
    }
    const fs::path first = work / "run1";
    const fs::path second = work / "run2";
    if (run_cli(cli, config, first, 1) != 0 || run_cli(cli, config, second, 3) != 0)
        return {false, "CLI run failed"};

    int identical = 0, total = 0;
    for (const char *name : {"per_user_se.csv", "cdf.csv", "summary.json", "diagnostics.json"}) {
        ++total;
        identical += slurp(first / name) == slurp(second / name) ? 1 : 0;
    }

    cli_power_ratio = 0.0;
    const nlohmann::json summary = nlohmann::json::parse(slurp(first / "summary.json"));
    for (const auto &s : summary["schemes"])
        cli_power_ratio = std::max(cli_power_ratio, s["max_power_ratio"].get<double>());
    const nlohmann::json diag = nlohmann::json::parse(slurp(first / "diagnostics.json"));
    for (const auto &s : diag)
        for (const auto &run : s["runs"])
            cli_power_ratio = std::max(cli_power_ratio, run["max_power_ratio"].get<double>());

    return {identical == total,
            std::to_string(identical) + "/" + std::to_string(total) + " files byte-identical (1 vs 3 threads)"};
}

void report(int id, const std::string &title, const Verdict &v, int &failures)
{
    std::printf("criterion %d %-28s %s  %s\n", id, title.c_str(), v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

Verdict guarded(const std::function<Verdict()> &body)
{
    try {
        return body();
    } catch (const std::exception &e) {
        return {false, std::string("exception: ") + e.what()};
    }
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"lsfp acceptance suite"};
    std::string cli;
    std::string work = "acceptance_work";
    app.add_option("--cli", cli, "path to the lsfp executable")->required();
    app.add_option("--work", work, "scratch directory");
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    report(1, "moment identities", guarded(moment_identities), failures);
    report(2, "link statistics vs MC", guarded(linkstats_oracle), failures);
    report(3, "WMMSE identities", guarded(wmmse_identities), failures);
    report(4, "ADMM optimality", guarded(admm_optimality), failures);
    report(5, "monotone ascent", guarded(monotone_ascent), failures);
    report(6, "tiny-scale global check", guarded(tiny_global), failures);

    double library_ratio = -1.0;
    report(7, "qualitative ordering", guarded([&] { return qualitative(library_ratio); }), failures);

    double cli_ratio = -1.0;
    const Verdict det = guarded([&] { return determinism(cli, work, cli_ratio); });

    Verdict feasible;
    const double worst = std::max(library_ratio, cli_ratio);
    feasible.pass = library_ratio >= 0.0 && cli_ratio >= 0.0 && worst <= 1.0 + kPowerSlack;
    feasible.detail = fmt("max power_used / rho_d %.12g (limit 1 + %.0e)", worst, kPowerSlack);
    report(8, "feasibility", feasible, failures);
    report(9, "determinism", det, failures);

    std::printf("%d of 9 criteria passed\n", 9 - failures);
    return failures == 0 ? 0 : 1;
}
