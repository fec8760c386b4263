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

#include "lsfp/linkstats.hpp"

#include <algorithm>
#include <cmath>

namespace lsfp {

LinkStatistics::LinkStatistics(int num_cells, int users_per_cell, EstimatorKind kind)
    : num_cells_(num_cells), users_per_cell_(users_per_cell), kind_(kind),
      b_(static_cast<std::size_t>(num_cells) * users_per_cell, CVec::Zero(num_cells)),
      c_(static_cast<std::size_t>(num_cells) * users_per_cell * users_per_cell, CMat::Zero(num_cells, num_cells)),
      omega_(static_cast<std::size_t>(num_cells) * users_per_cell, 0.0)
{
}

double quadratic_moment(const CMat &a, const CMat &b)
{
    const CMat ab = a * b;
    const cd tr = ab.trace();
    return std::norm(tr) + trace_product(ab, a * b.adjoint()).real();
}

RicianMoments rician_moments(const CMat &a, const CVec &xbar, const CMat &b, const CMat &cy)
{
    const CMat second_moment = a + xbar * xbar.adjoint();
    RicianMoments m;
    m.first = trace_product(b.adjoint(), second_moment);
    const cd tr_ab = trace_product(a, b);
    const cd quad = xbar.dot(b * xbar);
    m.second = std::norm(tr_ab) + 2.0 * (quad * trace_product(b.adjoint(), a)).real() +
               trace_product(cy, second_moment).real();
    return m;
}

namespace {

void fill_rank_one_offdiagonal(LinkStatistics &ls, int l, int k)
{
    const CVec &b = ls.b(l, k);
    CMat &c = ls.c(l, k, k);
    for (int r = 0; r < ls.num_cells(); ++r)
        for (int n = 0; n < ls.num_cells(); ++n)
            if (r != n) c(r, n) = b(r) * std::conj(b(n));
}

LinkStatistics closed_form_lmmse(const ChannelStatistics &stats, const PilotStatistics &pilots,
                                 const ScenarioConfig &config)
{
    const int l_count = stats.num_cells();
    const int k_count = stats.users_per_cell();
    const double tp_eta = config.pilot_length * config.pilot_power;
    LinkStatistics ls(l_count, k_count, EstimatorKind::LMMSE);

    // Per (BS r, pilot k): X = Psi^{-1} Rbar_rk^r and Y = Rbar X = E{ghat ghat^H} / (tau_p eta).
    std::vector<CMat> x(static_cast<std::size_t>(l_count) * k_count);
    std::vector<CMat> y(x.size());
    for (int r = 0; r < l_count; ++r) {
        for (int k = 0; k < k_count; ++k) {
            const std::size_t i = static_cast<std::size_t>(r) * k_count + k;
            const CMat &own = stats.second_moment(r, k, r);
            x[i] = pilots.solve(r, k, own);
            y[i] = own * x[i];
            ls.omega(r, k) = tp_eta * y[i].trace().real();
        }
    }

    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            for (int r = 0; r < l_count; ++r) {
                const std::size_t i = static_cast<std::size_t>(r) * k_count + k;
                const CMat &rbar = stats.second_moment(l, k, r);
                const CMat &nlos = stats.nlos_cov(l, k, r);
                const CVec &los = stats.los(l, k, r);

                ls.b(l, k)(r) = tp_eta * trace_product(x[i], rbar);

                const cd t_rx = trace_product(nlos, x[i].adjoint()); // tr(R Rbar_rk Psi^{-1})
                const cd t_xr = trace_product(x[i], nlos);           // tr(Psi^{-1} Rbar_rk R)
                const cd quad = los.dot(x[i].adjoint() * los);       // gbar^H Rbar_rk Psi^{-1} gbar
                const double diag = tp_eta * tp_eta * std::norm(t_rx) +
                                    2.0 * tp_eta * tp_eta * (quad * t_xr).real() +
                                    tp_eta * trace_product(y[i], rbar).real();
                ls.c(l, k, k)(r, r) = diag;

                for (int kp = 0; kp < k_count; ++kp) {
                    if (kp == k) continue;
                    const std::size_t j = static_cast<std::size_t>(r) * k_count + kp;
                    ls.c(l, k, kp)(r, r) = tp_eta * trace_product(y[j], rbar).real();
                }
            }
            fill_rank_one_offdiagonal(ls, l, k);
        }
    }
    return ls;
}

LinkStatistics closed_form_ls(const ChannelStatistics &stats, const PilotStatistics &pilots,
                              const ScenarioConfig &config)
{
    const int l_count = stats.num_cells();
    const int k_count = stats.users_per_cell();
    const double tp_eta = config.pilot_length * config.pilot_power;
    const double amp = std::sqrt(tp_eta);
    LinkStatistics ls(l_count, k_count, EstimatorKind::LS);

    for (int r = 0; r < l_count; ++r)
        for (int k = 0; k < k_count; ++k) ls.omega(r, k) = pilots.psi(r, k).trace().real();

    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            for (int r = 0; r < l_count; ++r) {
                const CMat &rbar = stats.second_moment(l, k, r);
                const double tr_nlos = stats.nlos_cov(l, k, r).trace().real();
                const double los_energy = stats.los(l, k, r).squaredNorm();

                ls.b(l, k)(r) = amp * rbar.trace().real();
                ls.c(l, k, k)(r, r) = tp_eta * tr_nlos * tr_nlos + 2.0 * tp_eta * los_energy * tr_nlos +
                                      trace_product(pilots.psi(r, k), rbar).real();
                for (int kp = 0; kp < k_count; ++kp) {
                    if (kp == k) continue;
                    ls.c(l, k, kp)(r, r) = trace_product(pilots.psi(r, kp), rbar).real();
                }
            }
            fill_rank_one_offdiagonal(ls, l, k);
        }
    }
    return ls;
}

} // namespace

LinkStatistics closed_form_linkstats(EstimatorKind kind, const ChannelStatistics &stats,
                                     const PilotStatistics &pilots, const ScenarioConfig &config)
{
    switch (kind) {
    case EstimatorKind::LMMSE: return closed_form_lmmse(stats, pilots, config);
    case EstimatorKind::LS: return closed_form_ls(stats, pilots, config);
    case EstimatorKind::EW_LMMSE: break;
    }
    throw std::invalid_argument("closed-form link statistics exist for LMMSE and LS only");
}

namespace {

struct MomentSums {
    std::vector<CVec> b;
    std::vector<CMat> c;
    std::vector<double> omega;
};

} // namespace

LinkStatistics mc_linkstats(EstimatorKind kind, const ChannelStatistics &stats, const PilotStatistics &pilots,
                            const ScenarioConfig &config, long n_samples, Rng &rng, int threads)
{
    if (n_samples < 1) throw std::invalid_argument("mc_linkstats: n_samples must be >= 1");

    const int l_count = stats.num_cells();
    const int k_count = stats.users_per_cell();
    const std::size_t pairs = static_cast<std::size_t>(l_count) * k_count;
    const long batches = std::min<long>(n_samples, 64);
    const std::uint64_t base_seed = rng();
    const ChannelSampler sampler(stats);

    std::vector<MomentSums> partial(static_cast<std::size_t>(batches));
    parallel_for(static_cast<std::size_t>(batches), resolve_thread_count(threads), [&](std::size_t batch) {
        Rng local = derive_rng(base_seed, batch);
        MomentSums sums;
        sums.b.assign(pairs, CVec::Zero(l_count));
        sums.c.assign(pairs * k_count, CMat::Zero(l_count, l_count));
        sums.omega.assign(pairs, 0.0);

        const long count = n_samples / batches + (static_cast<long>(batch) < n_samples % batches ? 1 : 0);
        ChannelRealization realization(l_count, k_count, stats.antennas());
        std::vector<CVec> precoders(pairs);
        CVec s(l_count);
        for (long it = 0; it < count; ++it) {
            sampler.sample_into(realization, local);
            for (int l = 0; l < l_count; ++l) {
                for (int k = 0; k < k_count; ++k) {
                    const CVec z = pilot_observation(realization, l, k, config, local);
                    precoders[static_cast<std::size_t>(l) * k_count + k] =
                        estimate_vector(kind, z, l, k, pilots, stats, config);
                }
            }
            for (std::size_t i = 0; i < pairs; ++i) sums.omega[i] += precoders[i].squaredNorm();

            for (int l = 0; l < l_count; ++l) {
                for (int k = 0; k < k_count; ++k) {
                    const std::size_t p = static_cast<std::size_t>(l) * k_count + k;
                    for (int kp = 0; kp < k_count; ++kp) {
                        for (int r = 0; r < l_count; ++r)
                            s(r) = precoders[static_cast<std::size_t>(r) * k_count + kp].dot(realization.channel(l, k, r));
                        sums.c[p * k_count + kp].noalias() += s * s.adjoint();
                        if (kp == k) sums.b[p] += s;
                    }
                }
            }
        }
        partial[batch] = std::move(sums);
    });

    LinkStatistics ls(l_count, k_count, kind);
    const double inv = 1.0 / static_cast<double>(n_samples);
    for (const auto &sums : partial) {
        for (int l = 0; l < l_count; ++l) {
            for (int k = 0; k < k_count; ++k) {
                const std::size_t p = static_cast<std::size_t>(l) * k_count + k;
                ls.b(l, k) += sums.b[p];
                ls.omega(l, k) += sums.omega[p];
                for (int kp = 0; kp < k_count; ++kp) ls.c(l, k, kp) += sums.c[p * k_count + kp];
            }
        }
    }
    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            ls.b(l, k) *= inv;
            ls.omega(l, k) *= inv;
            for (int kp = 0; kp < k_count; ++kp) ls.c(l, k, kp) *= inv;
        }
    }
    return ls;
}

nlohmann::json linkstats_to_json(const LinkStatistics &ls)
{
    auto complex_list = [](const auto &m) {
        nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                re.push_back(m(i, j).real());
                im.push_back(m(i, j).imag());
            }
        }
        return nlohmann::json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
    };

    nlohmann::json doc;
    doc["estimator"] = to_string(ls.kind());
    doc["L"] = ls.num_cells();
    doc["K"] = ls.users_per_cell();
    doc["users"] = nlohmann::json::array();
    for (int l = 0; l < ls.num_cells(); ++l) {
        for (int k = 0; k < ls.users_per_cell(); ++k) {
            nlohmann::json user{{"cell", l}, {"user", k}, {"omega", ls.omega(l, k)}, {"b", complex_list(ls.b(l, k))}};
            user["C"] = nlohmann::json::array();
            for (int kp = 0; kp < ls.users_per_cell(); ++kp) user["C"].push_back(complex_list(ls.c(l, k, kp)));
            doc["users"].push_back(std::move(user));
        }
    }
    return doc;
}

} // namespace lsfp
