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

#include "lsfp/harness.hpp"

#include "lsfp/config_io.hpp"
#include "lsfp/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace lsfp {

std::string to_string(Precoding precoding)
{
    switch (precoding) {
    case Precoding::LSFP:
        return "LSFP";
    case Precoding::SLP:
        return "SLP";
    case Precoding::LPA:
        return "LPA";
    }
    return "?";
}

void SchemeSpec::validate() const
{
    if (estimator == EstimatorKind::EW_LMMSE)
        throw ConfigError("schemes", name + ": only LMMSE and LS estimators have closed-form statistics");
    if (precoding == Precoding::LPA && objective)
        throw ConfigError("schemes", name + ": LPA takes no objective");
    if (precoding != Precoding::LPA && !objective) throw ConfigError("schemes", name + ": objective required");
    if (partial && precoding != Precoding::LSFP)
        throw ConfigError("schemes", name + ": partial selection only applies to LSFP");
}

namespace {

bool consume_prefix(std::string &s, const std::string &prefix)
{
    if (s.rfind(prefix, 0) != 0) return false;
    s.erase(0, prefix.size());
    return true;
}

std::string trim(const std::string &s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

} // namespace

SchemeSpec parse_scheme(const std::string &text, EstimatorKind default_estimator, int default_n_d)
{
    SchemeSpec spec;
    spec.name = trim(text);
    spec.estimator = default_estimator;
    spec.n_d = default_n_d;

    std::string rest = spec.name;
    if (consume_prefix(rest, "LS:"))
        spec.estimator = EstimatorKind::LS;
    else if (consume_prefix(rest, "LMMSE:"))
        spec.estimator = EstimatorKind::LMMSE;

    const auto at = rest.find('@');
    if (at != std::string::npos) {
        const std::string count = rest.substr(at + 1);
        rest.erase(at);
        try {
            std::size_t used = 0;
            spec.n_d = std::stoi(count, &used);
            if (used != count.size()) throw std::invalid_argument(count);
        } catch (const std::exception &) {
            throw ConfigError("schemes", "bad partial count in '" + spec.name + "'");
        }
    }

    if (consume_prefix(rest, "P-DS+Int-"))
        spec.partial = PartialMethod::DS_Int;
    else if (consume_prefix(rest, "P-DS-"))
        spec.partial = PartialMethod::DS;

    if (rest == "LPA") {
        spec.precoding = Precoding::LPA;
    } else {
        if (consume_prefix(rest, "LSFP-"))
            spec.precoding = Precoding::LSFP;
        else if (consume_prefix(rest, "SLP-"))
            spec.precoding = Precoding::SLP;
        else
            throw ConfigError("schemes", "unknown scheme '" + spec.name + "'");
        if (rest == "SumSE")
            spec.objective = Objective::SumSE;
        else if (rest == "PropFair")
            spec.objective = Objective::PropFair;
        else
            throw ConfigError("schemes", "unknown objective in '" + spec.name + "'");
    }
    if (!spec.partial && at != std::string::npos)
        throw ConfigError("schemes", "'" + spec.name + "': a partial count needs a P-DS prefix");
    spec.validate();
    return spec;
}

std::vector<SchemeSpec> parse_scheme_list(const std::string &text, EstimatorKind default_estimator, int default_n_d)
{
    std::vector<SchemeSpec> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_scheme(item, default_estimator, default_n_d));
    }
    if (out.empty()) throw ConfigError("schemes", "no schemes given");
    for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (out[i].name == out[j].name) throw ConfigError("schemes", "duplicate scheme '" + out[i].name + "'");
    return out;
}

namespace {

int resolve_n_d(const SchemeSpec &scheme, int num_cells, int users_per_cell)
{
    const int n_d = scheme.n_d >= 0 ? scheme.n_d : num_cells * users_per_cell / 2;
    if (n_d > num_cells * users_per_cell) throw ConfigError("partial_nd", "exceeds L*K for " + scheme.name);
    return n_d;
}

} // namespace

long fronthaul_symbols(const SchemeSpec &scheme, const ScenarioConfig &config)
{
    const long data = config.coherence_length - config.pilot_length;
    if (scheme.precoding != Precoding::LSFP) return 0;
    if (scheme.partial) return data * resolve_n_d(scheme, config.num_cells, config.users_per_cell);
    return data * config.num_cells * config.users_per_cell;
}

SchemeSolution solve_scheme(const SchemeSpec &scheme, const LinkStatistics &ls, const ScenarioConfig &config,
                            const SolverOptions &base)
{
    const int L = ls.num_cells();
    const int K = ls.users_per_cell();
    SchemeSolution out;
    if (scheme.precoding == Precoding::LPA) {
        out.weights = lpa_weights(ls, config);
        return out;
    }

    SupportMask mask;
    if (scheme.precoding == Precoding::SLP) {
        mask = SupportMask::single_layer(L, K);
    } else if (scheme.partial) {
        out.n_d = resolve_n_d(scheme, L, K);
        mask = select_partial_indices(*scheme.partial, ls, out.n_d).mask(L, K);
    } else {
        mask = SupportMask::full(L, K);
        out.n_d = L * K;
    }

    SolverOptions options = base;
    options.objective = *scheme.objective;
    WmmseResult solved = wmmse_solve(ls, config, options, mask);
    out.weights = std::move(solved.weights);
    out.diagnostics = std::move(solved.diagnostics);
    return out;
}

std::vector<double> user_spectral_efficiency(const LsfpWeights &weights, const LinkStatistics &ls,
                                             const ScenarioConfig &config)
{
    std::vector<double> se;
    se.reserve(static_cast<std::size_t>(weights.num_cells()) * weights.users_per_cell());
    for (int l = 0; l < weights.num_cells(); ++l)
        for (int k = 0; k < weights.users_per_cell(); ++k) {
            const double sinr = sinr_breakdown(l, k, weights, ls, config.noise_power).sinr;
            se.push_back(spectral_efficiency(sinr, config.coherence_length, config.pilot_length));
        }
    return se;
}

int ExperimentResult::total_not_converged() const
{
    int n = 0;
    for (const SchemeSummary &s : summaries) n += s.not_converged;
    return n;
}

double percentile(const std::vector<double> &sorted, double p)
{
    if (sorted.empty()) throw std::invalid_argument("percentile of an empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("percentile level outside [0, 1]");
    const double n = static_cast<double>(sorted.size());
    long index = static_cast<long>(std::ceil(p * n - 1e-9)) - 1;
    index = std::clamp(index, 0L, static_cast<long>(sorted.size()) - 1);
    return sorted[static_cast<std::size_t>(index)];
}

namespace {

nlohmann::json weights_to_json(const LsfpWeights &w)
{
    nlohmann::json users = nlohmann::json::array();
    for (int l = 0; l < w.num_cells(); ++l)
        for (int k = 0; k < w.users_per_cell(); ++k) {
            nlohmann::json re = nlohmann::json::array();
            nlohmann::json im = nlohmann::json::array();
            for (int r = 0; r < w.num_cells(); ++r) {
                re.push_back(w.a(l, k)(r).real());
                im.push_back(w.a(l, k)(r).imag());
            }
            users.push_back({{"cell", l}, {"user", k}, {"re", re}, {"im", im}});
        }
    return users;
}

double max_relative_deviation(const std::vector<double> &ref, const std::vector<double> &other)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double scale = std::max(std::abs(ref[i]), 1e-12);
        worst = std::max(worst, std::abs(other[i] - ref[i]) / scale);
    }
    return worst;
}

SetupOutcome run_setup(const ScenarioConfig &config, const std::vector<SchemeSpec> &schemes, std::uint64_t seed,
                       int setup, const RunOptions &options)
{
    Rng rng = derive_rng(seed, static_cast<std::uint64_t>(setup));
    const ChannelStatistics stats = generate_network(config, rng);
    const PilotStatistics pilots(stats, config);

    std::map<EstimatorKind, LinkStatistics> closed;
    std::map<EstimatorKind, LinkStatistics> sampled;
    for (const SchemeSpec &s : schemes) {
        if (closed.count(s.estimator)) continue;
        closed.emplace(s.estimator, closed_form_linkstats(s.estimator, stats, pilots, config));
        if (options.mc_validate_samples > 0) {
            Rng mc_rng = derive_rng(seed ^ 0x6d632d76616c6964ULL, static_cast<std::uint64_t>(setup) * 4 +
                                                                        static_cast<std::uint64_t>(s.estimator));
            sampled.emplace(s.estimator, mc_linkstats(s.estimator, stats, pilots, config,
                                                      options.mc_validate_samples, mc_rng, 1));
        }
    }

    SetupOutcome out;
    if (options.keep_debug) {
        for (const auto &[kind, ls] : closed) out.linkstats_dump[to_string(kind)] = linkstats_to_json(ls);
    }
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const SchemeSpec &scheme = schemes[i];
        const LinkStatistics &ls = closed.at(scheme.estimator);
        SolverOptions solver = options.solver;
        solver.seed = derive_rng(seed, (static_cast<std::uint64_t>(setup) << 16) + i + 1)();

        SchemeSolution solution = solve_scheme(scheme, ls, config, solver);
        SchemeOutcome outcome;
        outcome.se = user_spectral_efficiency(solution.weights, ls, config);
        outcome.diagnostics = std::move(solution.diagnostics);
        outcome.n_d = solution.n_d;
        for (int bs = 0; bs < config.num_cells; ++bs)
            outcome.max_power_ratio =
                std::max(outcome.max_power_ratio, power_used(bs, solution.weights, ls) / config.max_bs_power);
        if (options.mc_validate_samples > 0) {
            const std::vector<double> mc_se =
                user_spectral_efficiency(solution.weights, sampled.at(scheme.estimator), config);
            outcome.mc_max_se_deviation = max_relative_deviation(outcome.se, mc_se);
        }
        if (options.keep_debug) outcome.weights_dump = weights_to_json(solution.weights);
        out.schemes.push_back(std::move(outcome));
    }
    return out;
}

} // namespace

ExperimentResult run_experiment(const ScenarioConfig &config, const std::vector<SchemeSpec> &schemes, int n_setups,
                                std::uint64_t seed, const RunOptions &options)
{
    if (n_setups < 1) throw ConfigError("setups", "must be >= 1");
    if (schemes.empty()) throw ConfigError("schemes", "no schemes given");
    config.validate();
    options.solver.validate();
    for (const SchemeSpec &s : schemes) {
        s.validate();
        if (s.partial) resolve_n_d(s, config.num_cells, config.users_per_cell);
    }

    ExperimentResult result;
    result.config = config;
    result.schemes = schemes;
    result.n_setups = n_setups;
    result.seed = seed;
    result.setups.resize(n_setups);

    parallel_for(static_cast<std::size_t>(n_setups), resolve_thread_count(options.threads), [&](std::size_t i) {
        result.setups[i] = run_setup(config, schemes, seed, static_cast<int>(i), options);
    });

    for (std::size_t s = 0; s < schemes.size(); ++s) {
        SchemeSummary summary;
        summary.name = schemes[s].name;
        summary.fronthaul = fronthaul_symbols(schemes[s], config);
        for (const SetupOutcome &setup : result.setups) {
            const SchemeOutcome &o = setup.schemes[s];
            summary.sorted_se.insert(summary.sorted_se.end(), o.se.begin(), o.se.end());
            if (o.diagnostics) {
                if (o.diagnostics->converged)
                    ++summary.converged;
                else
                    ++summary.not_converged;
            }
            summary.max_power_ratio = std::max(summary.max_power_ratio, o.max_power_ratio);
            summary.mc_max_se_deviation = std::max(summary.mc_max_se_deviation, o.mc_max_se_deviation);
        }
        std::sort(summary.sorted_se.begin(), summary.sorted_se.end());
        for (double v : summary.sorted_se) summary.sum_se += v;
        summary.mean = summary.sum_se / static_cast<double>(summary.sorted_se.size());
        summary.median = percentile(summary.sorted_se, 0.5);
        summary.p10 = percentile(summary.sorted_se, 0.1);
        summary.p05 = percentile(summary.sorted_se, 0.05);
        result.summaries.push_back(std::move(summary));
    }
    return result;
}

std::string format_number(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", value);
    return buf;
}

void round_json_numbers(nlohmann::json &doc)
{
    if (doc.is_number_float()) {
        const double v = doc.get<double>();
        if (std::isfinite(v)) doc = std::stod(format_number(v));
    } else if (doc.is_structured()) {
        for (auto &item : doc) round_json_numbers(item);
    }
}

nlohmann::json summary_to_json(const ExperimentResult &result)
{
    nlohmann::json doc;
    doc["config"] = scenario_to_json(result.config);
    doc["seed"] = result.seed;
    doc["setups"] = result.n_setups;
    nlohmann::json schemes = nlohmann::json::array();
    for (std::size_t s = 0; s < result.summaries.size(); ++s) {
        const SchemeSummary &m = result.summaries[s];
        const SchemeSpec &spec = result.schemes[s];
        nlohmann::json j;
        j["scheme"] = m.name;
        j["estimator"] = to_string(spec.estimator);
        j["precoding"] = to_string(spec.precoding);
        j["objective"] = spec.objective ? to_string(*spec.objective) : "none";
        if (spec.partial) j["partial"] = to_string(*spec.partial);
        j["samples"] = m.sorted_se.size();
        j["median_se"] = m.median;
        j["p10_se"] = m.p10;
        j["p05_se"] = m.p05;
        j["mean_se"] = m.mean;
        j["sum_se"] = m.sum_se;
        j["sum_se_per_setup"] = m.sum_se / result.n_setups;
        j["fronthaul_symbols"] = m.fronthaul;
        j["converged"] = m.converged;
        j["not_converged"] = m.not_converged;
        j["max_power_ratio"] = m.max_power_ratio;
        if (m.mc_max_se_deviation >= 0.0) j["mc_max_se_deviation"] = m.mc_max_se_deviation;
        schemes.push_back(std::move(j));
    }
    doc["schemes"] = std::move(schemes);
    round_json_numbers(doc);
    return doc;
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string render_svg(const ExperimentResult &result)
{
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2",
                                   "#7f7f7f"};
    const double width = 640, height = 420, left = 60, right = 180, top = 20, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    double x_max = 0.0;
    for (const SchemeSummary &s : result.summaries) x_max = std::max(x_max, s.sorted_se.back());
    if (x_max <= 0.0) x_max = 1.0;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
        << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 15
        << "\" text-anchor=\"middle\" font-size=\"13\">SE per user [bit/s/Hz]</text>\n";
    svg << "<text x=\"15\" y=\"" << top + plot_h / 2 << "\" font-size=\"13\" transform=\"rotate(-90 15 "
        << top + plot_h / 2 << ")\" text-anchor=\"middle\">CDF</text>\n";
    for (int t = 0; t <= 4; ++t) {
        const double x = left + plot_w * t / 4.0;
        const double y = top + plot_h - plot_h * t / 4.0;
        svg << "<text x=\"" << x << "\" y=\"" << top + plot_h + 16 << "\" font-size=\"11\" text-anchor=\"middle\">"
            << format_number(x_max * t / 4.0) << "</text>\n";
        svg << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
            << format_number(t / 4.0) << "</text>\n";
    }
    for (std::size_t s = 0; s < result.summaries.size(); ++s) {
        const std::vector<double> &v = result.summaries[s].sorted_se;
        const char *color = colors[s % 8];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double x = left + plot_w * v[i] / x_max;
            const double y0 = top + plot_h - plot_h * static_cast<double>(i) / v.size();
            const double y1 = top + plot_h - plot_h * static_cast<double>(i + 1) / v.size();
            svg << format_number(x) << ',' << format_number(y0) << ' ' << format_number(x) << ','
                << format_number(y1) << ' ';
        }
        svg << "\"/>\n";
        const double ly = top + 14 + 18.0 * s;
        svg << "<line x1=\"" << width - right + 10 << "\" y1=\"" << ly << "\" x2=\"" << width - right + 30
            << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << width - right + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
            << result.summaries[s].name << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

} // namespace

void emit_outputs(const ExperimentResult &result, const std::string &out_dir, bool svg)
{
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

    const int K = result.config.users_per_cell;
    std::ostringstream per_user;
    per_user << "setup,scheme,cell,user,se_bps_hz\n";
    for (int setup = 0; setup < result.n_setups; ++setup)
        for (std::size_t s = 0; s < result.schemes.size(); ++s) {
            const std::vector<double> &se = result.setups[setup].schemes[s].se;
            for (std::size_t i = 0; i < se.size(); ++i)
                per_user << setup << ',' << result.schemes[s].name << ',' << i / K << ',' << i % K << ','
                         << format_number(se[i]) << '\n';
        }
    write_file(dir / "per_user_se.csv", per_user.str());

    std::ostringstream cdf;
    cdf << "scheme,se_bps_hz,cdf\n";
    for (const SchemeSummary &s : result.summaries) {
        const std::size_t n = s.sorted_se.size();
        for (std::size_t i = 0; i < n; ++i)
            cdf << s.name << ',' << format_number(s.sorted_se[i]) << ','
                << format_number(static_cast<double>(i + 1) / n) << '\n';
    }
    write_file(dir / "cdf.csv", cdf.str());

    write_file(dir / "summary.json", summary_to_json(result).dump(2) + "\n");

    nlohmann::json diag = nlohmann::json::array();
    for (std::size_t s = 0; s < result.schemes.size(); ++s) {
        nlohmann::json runs = nlohmann::json::array();
        for (int setup = 0; setup < result.n_setups; ++setup) {
            const SchemeOutcome &o = result.setups[setup].schemes[s];
            nlohmann::json j = o.diagnostics ? diagnostics_to_json(*o.diagnostics) : nlohmann::json::object();
            j["setup"] = setup;
            j["n_d"] = o.n_d;
            j["max_power_ratio"] = o.max_power_ratio;
            runs.push_back(std::move(j));
        }
        diag.push_back({{"scheme", result.schemes[s].name}, {"runs", std::move(runs)}});
    }
    round_json_numbers(diag);
    write_file(dir / "diagnostics.json", diag.dump(2) + "\n");

    if (svg) write_file(dir / "cdf.svg", render_svg(result));

    bool has_debug = false;
    for (const SetupOutcome &s : result.setups) has_debug = has_debug || !s.linkstats_dump.is_null();
    if (has_debug) {
        const fs::path debug = dir / "debug";
        fs::create_directories(debug, ec);
        if (ec) throw std::runtime_error("cannot create " + debug.string() + ": " + ec.message());
        for (int setup = 0; setup < result.n_setups; ++setup) {
            const SetupOutcome &o = result.setups[setup];
            nlohmann::json doc;
            doc["linkstats"] = o.linkstats_dump;
            nlohmann::json weights = nlohmann::json::object();
            for (std::size_t s = 0; s < result.schemes.size(); ++s)
                weights[result.schemes[s].name] = o.schemes[s].weights_dump;
            doc["weights"] = std::move(weights);
            round_json_numbers(doc);
            write_file(debug / ("setup_" + std::to_string(setup) + ".json"), doc.dump(1) + "\n");
        }
    }
}

namespace {

void compare(const LinkStatistics &cf, const LinkStatistics &mc, const std::string &name,
             std::vector<ValidationRow> &rows)
{
    const int L = cf.num_cells();
    const int K = cf.users_per_cell();
    double b_err = 0.0, w_err = 0.0, c_err = 0.0, zero_cf = 0.0, zero_mc = 0.0;
    for (int l = 0; l < L; ++l)
        for (int k = 0; k < K; ++k) {
            w_err = std::max(w_err, std::abs(mc.omega(l, k) - cf.omega(l, k)) / cf.omega(l, k));
            for (int r = 0; r < L; ++r)
                b_err = std::max(b_err, std::abs(mc.b(l, k)(r) - cf.b(l, k)(r)) / std::abs(cf.b(l, k)(r)));
            for (int kp = 0; kp < K; ++kp) {
                const CMat &c = cf.c(l, k, kp);
                const CMat &m = mc.c(l, k, kp);
                const double scale = c.cwiseAbs().maxCoeff();
                for (int r = 0; r < L; ++r)
                    for (int n = 0; n < L; ++n) {
                        if (kp != k && r != n) zero_cf = std::max(zero_cf, std::abs(c(r, n)) / scale);
                        if (std::abs(c(r, n)) > 1e-6 * scale)
                            c_err = std::max(c_err, std::abs(m(r, n) - c(r, n)) / std::abs(c(r, n)));
                        else
                            zero_mc = std::max(zero_mc, std::abs(m(r, n)) / scale);
                    }
            }
        }
    rows.push_back({name, "b", b_err, 0.02, b_err <= 0.02});
    rows.push_back({name, "omega", w_err, 0.02, w_err <= 0.02});
    rows.push_back({name, "C", c_err, 0.03, c_err <= 0.03});
    rows.push_back({name, "C zero entries (closed form)", zero_cf, 0.0, zero_cf == 0.0});
    rows.push_back({name, "C near-zero entries (Monte Carlo / max|C|)", zero_mc, 0.03, zero_mc <= 0.03});
}

} // namespace

std::vector<ValidationRow> validate_linkstats(const ScenarioConfig &config, long samples, int threads)
{
    if (samples < 1) throw ConfigError("samples", "must be >= 1");
    config.validate();
    Rng rng(config.seed);
    const ChannelStatistics stats = generate_network(config, rng);
    const PilotStatistics pilots(stats, config);
    std::vector<ValidationRow> rows;
    for (EstimatorKind kind : {EstimatorKind::LMMSE, EstimatorKind::LS}) {
        const LinkStatistics cf = closed_form_linkstats(kind, stats, pilots, config);
        Rng mc_rng = derive_rng(config.seed, 1 + static_cast<std::uint64_t>(kind));
        const LinkStatistics mc = mc_linkstats(kind, stats, pilots, config, samples, mc_rng, threads);
        compare(cf, mc, to_string(kind), rows);
    }
    return rows;
}

} // namespace lsfp
