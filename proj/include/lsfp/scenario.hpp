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

#ifndef LSFP_SCENARIO_HPP
#define LSFP_SCENARIO_HPP

#include "lsfp/common.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace lsfp {

enum class FadingKind { RicianCorrelated, RayleighUncorrelated };

std::string to_string(FadingKind kind);

/// Network and radio parameters for one experiment. Defaults are the
/// 16-cell, 200-antenna, 8-user urban-microcell setup.
struct ScenarioConfig {
    int num_cells = 16;         // L
    int users_per_cell = 8;     // K
    int antennas = 200;         // M
    int coherence_length = 200; // tau_c, samples
    int pilot_length = 8;       // tau_p, samples; must equal users_per_cell
    double pilot_power = 0.1;   // eta, W
    double max_bs_power = 10.0; // rho_d, W
    double noise_power = 2.5118864315095824e-13; // sigma^2, W (-96 dBm)
    double cell_side = 250.0;                     // m
    double min_bs_distance = 20.0;                // m, 2D
    double asd_deg = 10.0;
    double pathloss_exponent_db_per_decade = 36.7;
    double pathloss_intercept_db = 30.5;
    double rician_k_intercept_db = 13.0;
    double rician_k_slope_db_per_m = 0.03;
    double height_diff_m = 11.0;
    FadingKind fading = FadingKind::RicianCorrelated;
    std::uint64_t seed = 0;

    // Log-normal shadowing standard deviation; 0 disables it.
    double shadow_fading_std_db = 0.0;
    // Explicit BS coordinates (m). Empty means a sqrt(L) x sqrt(L) grid of
    // cell_side squares with the BS in the middle of each.
    std::vector<std::array<double, 2>> bs_positions;

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    double sqrt_pilot_snr_scale() const { return std::sqrt(pilot_length * pilot_power); }
};

/// Long-term statistics of one user-to-BS link.
struct LinkChannel {
    CVec los;           // deterministic LOS part (includes the LOS gain)
    CMat nlos_cov;      // NLOS covariance
    CMat second_moment; // nlos_cov + los * los^H
    double azimuth = 0.0;
    double elevation = 0.0;
    double los_gain = 0.0;
    double nlos_gain = 0.0;
    double distance_2d = 0.0;
};

/// Statistics for every (cell, user, BS) triple. Immutable once built.
class ChannelStatistics {
public:
    ChannelStatistics() = default;
    ChannelStatistics(int num_cells, int users_per_cell, int antennas);

    int num_cells() const { return num_cells_; }
    int users_per_cell() const { return users_per_cell_; }
    int antennas() const { return antennas_; }

    /// Link from user `user` of cell `cell` to BS `bs`.
    const LinkChannel &link(int cell, int user, int bs) const { return links_[index(cell, user, bs)]; }
    const CVec &los(int cell, int user, int bs) const { return link(cell, user, bs).los; }
    const CMat &nlos_cov(int cell, int user, int bs) const { return link(cell, user, bs).nlos_cov; }
    const CMat &second_moment(int cell, int user, int bs) const { return link(cell, user, bs).second_moment; }

    /// Stores the link and derives its second moment.
    void set_link(int cell, int user, int bs, LinkChannel channel);

    std::vector<std::array<double, 2>> bs_positions;
    std::vector<std::array<double, 2>> user_positions; // index cell * K + user

private:
    std::size_t index(int cell, int user, int bs) const
    {
        return (static_cast<std::size_t>(cell) * users_per_cell_ + user) * num_cells_ + bs;
    }

    int num_cells_ = 0;
    int users_per_cell_ = 0;
    int antennas_ = 0;
    std::vector<LinkChannel> links_;
};

/// One coherence-block draw of every channel.
class ChannelRealization {
public:
    ChannelRealization() = default;
    ChannelRealization(int num_cells, int users_per_cell, int antennas);

    CVec &channel(int cell, int user, int bs) { return channels_[index(cell, user, bs)]; }
    const CVec &channel(int cell, int user, int bs) const { return channels_[index(cell, user, bs)]; }
    double &phase(int cell, int user, int bs) { return phases_[index(cell, user, bs)]; }
    double phase(int cell, int user, int bs) const { return phases_[index(cell, user, bs)]; }

    int num_cells() const { return num_cells_; }
    int users_per_cell() const { return users_per_cell_; }
    int antennas() const { return antennas_; }

private:
    std::size_t index(int cell, int user, int bs) const
    {
        return (static_cast<std::size_t>(cell) * users_per_cell_ + user) * num_cells_ + bs;
    }

    int num_cells_ = 0;
    int users_per_cell_ = 0;
    int antennas_ = 0;
    std::vector<CVec> channels_;
    std::vector<double> phases_;
};

/// Half-wavelength ULA response scaled by sqrt(los_gain).
CVec steering_vector(int antennas, double azimuth, double elevation, double los_gain);

/// Gaussian local-scattering covariance around `azimuth` (already the
/// effective azimuth when elevation matters) with angular std `asd`.
CMat local_scattering_covariance(int antennas, double azimuth, double asd, double nlos_gain);

/// Path gain (linear) at 3D distance `distance_3d` under the configured model.
double path_gain(const ScenarioConfig &config, double distance_3d);

/// Rician K-factor (linear) at 2D distance `distance_2d`.
double rician_factor(const ScenarioConfig &config, double distance_2d);

/// Drops users and builds the long-term statistics. Deterministic given the rng state.
ChannelStatistics generate_network(const ScenarioConfig &config, Rng &rng);

/// Same, seeded from `config.seed`.
ChannelStatistics generate_network(const ScenarioConfig &config);

/// Draws realizations for fixed statistics. Square-root factors of every
/// NLOS covariance are computed once at construction.
class ChannelSampler {
public:
    explicit ChannelSampler(const ChannelStatistics &stats);

    ChannelRealization sample(Rng &rng) const;
    void sample_into(ChannelRealization &out, Rng &rng) const;

    const ChannelStatistics &statistics() const { return *stats_; }

private:
    const ChannelStatistics *stats_;
    std::vector<CMat> sqrt_factors_;
};

/// Hermitian square root of a PSD matrix. Eigenvalues below zero are clipped
/// when they are within -1e-10 * trace; anything more negative throws
/// StatisticsError.
CMat hermitian_sqrt(const CMat &cov);

ChannelRealization sample_channels(const ChannelStatistics &stats, Rng &rng);

} // namespace lsfp

#endif
