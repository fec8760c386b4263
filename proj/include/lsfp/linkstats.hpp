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

#ifndef LSFP_LINKSTATS_HPP
#define LSFP_LINKSTATS_HPP

#include "lsfp/common.hpp"
#include "lsfp/estimation.hpp"
#include "lsfp/scenario.hpp"

#include <json.hpp>

#include <vector>

namespace lsfp {

/// Long-term link statistics that fully determine every user's SINR:
///   b(l, k)[r]        = E{w_rk^H g_lk^r}
///   C(l, k, k')(r, n) = E{w_rk'^H g_lk^r (g_lk^n)^H w_nk'}
///   omega(l, k)       = E{||w_lk||^2}
/// where w_lk is the local MR precoder of BS l for pilot k.
class LinkStatistics {
public:
    LinkStatistics() = default;
    LinkStatistics(int num_cells, int users_per_cell, EstimatorKind kind);

    int num_cells() const { return num_cells_; }
    int users_per_cell() const { return users_per_cell_; }
    EstimatorKind kind() const { return kind_; }

    CVec &b(int cell, int user) { return b_[pair(cell, user)]; }
    const CVec &b(int cell, int user) const { return b_[pair(cell, user)]; }
    /// Cross-moment matrix of user (cell, user) against the precoders of pilot `group`.
    CMat &c(int cell, int user, int group) { return c_[pair(cell, user) * users_per_cell_ + group]; }
    const CMat &c(int cell, int user, int group) const { return c_[pair(cell, user) * users_per_cell_ + group]; }
    double &omega(int bs, int pilot) { return omega_[pair(bs, pilot)]; }
    double omega(int bs, int pilot) const { return omega_[pair(bs, pilot)]; }

private:
    std::size_t pair(int l, int k) const { return static_cast<std::size_t>(l) * users_per_cell_ + k; }

    int num_cells_ = 0;
    int users_per_cell_ = 0;
    EstimatorKind kind_ = EstimatorKind::LMMSE;
    std::vector<CVec> b_;
    std::vector<CMat> c_;
    std::vector<double> omega_;
};

/// E{|u^H B u|^2} for u ~ CN(0, A): |tr(AB)|^2 + tr(A B A B^H).
double quadratic_moment(const CMat &a, const CMat &b);

struct RicianMoments {
    cd first;      // E{y^H x}
    double second; // E{|y^H x|^2}
};

/// Moments of y^H x for x = e^{j theta} xbar + xtilde (theta uniform,
/// xtilde ~ CN(0, A)) and y = B x + z with z zero-mean, independent of x,
/// and cov(y) = cy.
RicianMoments rician_moments(const CMat &a, const CVec &xbar, const CMat &b, const CMat &cy);

/// Exact statistics for MR precoding on LMMSE estimates or on raw LS
/// observations. EW_LMMSE has no closed form here and is rejected.
LinkStatistics closed_form_linkstats(EstimatorKind kind, const ChannelStatistics &stats,
                                     const PilotStatistics &pilots, const ScenarioConfig &config);

/// Sample-average estimate of the same quantities from `n_samples` channel
/// and noise draws. Work is split into fixed batches with their own streams,
/// so the result depends only on the rng state, never on `threads`.
LinkStatistics mc_linkstats(EstimatorKind kind, const ChannelStatistics &stats, const PilotStatistics &pilots,
                            const ScenarioConfig &config, long n_samples, Rng &rng, int threads = 0);

nlohmann::json linkstats_to_json(const LinkStatistics &ls);

} // namespace lsfp

#endif
