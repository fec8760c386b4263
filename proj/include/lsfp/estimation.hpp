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

#ifndef LSFP_ESTIMATION_HPP
#define LSFP_ESTIMATION_HPP

#include "lsfp/common.hpp"
#include "lsfp/scenario.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace lsfp {

/// Pilot-observation covariance for pilot `pilot` at BS `bs`:
/// tau_p * eta * sum_r Rbar(r, pilot, bs) + sigma^2 I.
CMat psi_matrix(int bs, int pilot, const ChannelStatistics &stats, const ScenarioConfig &config);

/// Per-(BS, pilot) observation statistics with a cached Cholesky factor of
/// each Psi. Built once, then read-only.
class PilotStatistics {
public:
    PilotStatistics() = default;
    PilotStatistics(const ChannelStatistics &stats, const ScenarioConfig &config);

    int num_cells() const { return num_cells_; }
    int users_per_cell() const { return users_per_cell_; }

    const CMat &psi(int bs, int pilot) const { return psi_[index(bs, pilot)]; }
    /// diag(Psi), real and >= sigma^2.
    const RVec &psi_diagonal(int bs, int pilot) const { return lambda_[index(bs, pilot)]; }
    /// diag(Rbar(bs, pilot, bs)), the own-channel second-moment diagonal.
    const RVec &own_diagonal(int bs, int pilot) const { return dbar_[index(bs, pilot)]; }

    /// Psi^{-1} * rhs through the cached factor.
    CMat solve(int bs, int pilot, const CMat &rhs) const;
    CVec solve(int bs, int pilot, const CVec &rhs) const;

private:
    std::size_t index(int bs, int pilot) const { return static_cast<std::size_t>(bs) * users_per_cell_ + pilot; }

    int num_cells_ = 0;
    int users_per_cell_ = 0;
    std::vector<CMat> psi_;
    std::vector<RVec> lambda_;
    std::vector<RVec> dbar_;
    std::vector<Eigen::LLT<CMat>> factors_;
};

/// Despread pilot observation z = sqrt(tau_p eta) sum_r g(r, pilot, bs) + n.
CVec pilot_observation(const ChannelRealization &realization, int bs, int pilot, const ScenarioConfig &config,
                       Rng &rng);

struct ChannelEstimate {
    EstimatorKind kind = EstimatorKind::LMMSE;
    CVec estimate;     // for LS this is z itself
    CMat estimate_cov; // E{ghat ghat^H}
    CMat error_cov;    // E{(g - ghat)(g - ghat)^H}
};

/// Estimate of the own channel g(bs, pilot, bs) from its observation z.
CVec estimate_vector(EstimatorKind kind, const CVec &z, int bs, int pilot, const PilotStatistics &pilots,
                     const ChannelStatistics &stats, const ScenarioConfig &config);

/// Estimate plus its covariance and the error covariance.
ChannelEstimate channel_estimate(EstimatorKind kind, const CVec &z, int bs, int pilot, const PilotStatistics &pilots,
                                 const ChannelStatistics &stats, const ScenarioConfig &config);

} // namespace lsfp

#endif
