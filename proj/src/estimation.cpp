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

#include "lsfp/estimation.hpp"

namespace lsfp {

CMat psi_matrix(int bs, int pilot, const ChannelStatistics &stats, const ScenarioConfig &config)
{
    const int antennas = stats.antennas();
    CMat psi = config.noise_power * CMat::Identity(antennas, antennas);
    const double scale = config.pilot_length * config.pilot_power;
    for (int r = 0; r < stats.num_cells(); ++r) psi += scale * stats.second_moment(r, pilot, bs);
    return psi;
}

PilotStatistics::PilotStatistics(const ChannelStatistics &stats, const ScenarioConfig &config)
    : num_cells_(stats.num_cells()), users_per_cell_(stats.users_per_cell())
{
    const std::size_t n = static_cast<std::size_t>(num_cells_) * users_per_cell_;
    psi_.reserve(n);
    lambda_.reserve(n);
    dbar_.reserve(n);
    factors_.reserve(n);
    for (int l = 0; l < num_cells_; ++l) {
        for (int k = 0; k < users_per_cell_; ++k) {
            CMat psi = psi_matrix(l, k, stats, config);
            Eigen::LLT<CMat> llt(psi);
            if (llt.info() != Eigen::Success)
                throw NumericError("Psi(" + std::to_string(l) + "," + std::to_string(k) + ") is not positive definite");
            lambda_.push_back(psi.diagonal().real());
            dbar_.push_back(stats.second_moment(l, k, l).diagonal().real());
            psi_.push_back(std::move(psi));
            factors_.push_back(std::move(llt));
        }
    }
}

CMat PilotStatistics::solve(int bs, int pilot, const CMat &rhs) const
{
    return factors_[index(bs, pilot)].solve(rhs);
}

CVec PilotStatistics::solve(int bs, int pilot, const CVec &rhs) const
{
    return factors_[index(bs, pilot)].solve(rhs);
}

CVec pilot_observation(const ChannelRealization &realization, int bs, int pilot, const ScenarioConfig &config,
                       Rng &rng)
{
    CVec z = std::sqrt(config.noise_power) * complex_normal_vector(realization.antennas(), rng);
    const double amp = config.sqrt_pilot_snr_scale();
    for (int r = 0; r < realization.num_cells(); ++r) z += amp * realization.channel(r, pilot, bs);
    return z;
}

CVec estimate_vector(EstimatorKind kind, const CVec &z, int bs, int pilot, const PilotStatistics &pilots,
                     const ChannelStatistics &stats, const ScenarioConfig &config)
{
    const double amp = config.sqrt_pilot_snr_scale();
    switch (kind) {
    case EstimatorKind::LMMSE:
        return amp * (stats.second_moment(bs, pilot, bs) * pilots.solve(bs, pilot, z));
    case EstimatorKind::EW_LMMSE: {
        const RVec gain = pilots.own_diagonal(bs, pilot).cwiseQuotient(pilots.psi_diagonal(bs, pilot));
        return amp * (gain.cast<cd>().cwiseProduct(z));
    }
    case EstimatorKind::LS:
        return z;
    }
    return z;
}

ChannelEstimate channel_estimate(EstimatorKind kind, const CVec &z, int bs, int pilot, const PilotStatistics &pilots,
                                 const ChannelStatistics &stats, const ScenarioConfig &config)
{
    ChannelEstimate out;
    out.kind = kind;
    out.estimate = estimate_vector(kind, z, bs, pilot, pilots, stats, config);

    const double tp_eta = config.pilot_length * config.pilot_power;
    const double amp = std::sqrt(tp_eta);
    const CMat &rbar = stats.second_moment(bs, pilot, bs);
    const CMat &psi = pilots.psi(bs, pilot);

    // ghat = W z with E{z z^H} = Psi and E{g z^H} = sqrt(tau_p eta) Rbar.
    CMat w;
    switch (kind) {
    case EstimatorKind::LMMSE:
        w = amp * rbar * pilots.solve(bs, pilot, CMat(CMat::Identity(psi.rows(), psi.cols())));
        break;
    case EstimatorKind::EW_LMMSE:
        w = (amp * pilots.own_diagonal(bs, pilot).cwiseQuotient(pilots.psi_diagonal(bs, pilot))).cast<cd>().asDiagonal();
        break;
    case EstimatorKind::LS:
        w = CMat::Identity(psi.rows(), psi.cols());
        break;
    }

    if (kind == EstimatorKind::LMMSE) {
        out.estimate_cov = tp_eta * rbar * pilots.solve(bs, pilot, rbar);
        out.error_cov = rbar - out.estimate_cov;
    } else {
        out.estimate_cov = w * psi * w.adjoint();
        const CMat cross = amp * rbar * w.adjoint(); // E{g ghat^H}
        out.error_cov = rbar - cross - cross.adjoint() + out.estimate_cov;
    }
    // Symmetrize round-off.
    out.estimate_cov = 0.5 * (out.estimate_cov + out.estimate_cov.adjoint()).eval();
    out.error_cov = 0.5 * (out.error_cov + out.error_cov.adjoint()).eval();
    return out;
}

} // namespace lsfp
