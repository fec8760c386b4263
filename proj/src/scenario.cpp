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

#include "lsfp/scenario.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

#include <cmath>

namespace lsfp {

std::string to_string(FadingKind kind)
{
    return kind == FadingKind::RicianCorrelated ? "rician_correlated" : "rayleigh_uncorrelated";
}

void ScenarioConfig::validate() const
{
    if (num_cells < 1) throw ConfigError("L", "must be >= 1");
    if (users_per_cell < 1) throw ConfigError("K", "must be >= 1");
    if (antennas < 1) throw ConfigError("M", "must be >= 1");
    if (pilot_length != users_per_cell) throw ConfigError("tau_p", "must equal K");
    if (coherence_length < pilot_length) throw ConfigError("tau_c", "must be >= tau_p");
    if (!(pilot_power > 0.0)) throw ConfigError("eta", "must be > 0");
    if (!(max_bs_power > 0.0)) throw ConfigError("rho_d", "must be > 0");
    if (!(noise_power > 0.0)) throw ConfigError("sigma2", "must be > 0");
    if (!(cell_side > 0.0)) throw ConfigError("cell_side", "must be > 0");
    if (!(min_bs_distance > 0.0)) throw ConfigError("min_bs_distance", "must be > 0");
    if (!(asd_deg >= 0.0)) throw ConfigError("asd_deg", "must be >= 0");
    if (!(height_diff_m >= 0.0)) throw ConfigError("height_diff_m", "must be >= 0");
    if (!(shadow_fading_std_db >= 0.0)) throw ConfigError("shadow_fading_std_db", "must be >= 0");
    if (!std::isfinite(pathloss_intercept_db) || !std::isfinite(pathloss_exponent_db_per_decade))
        throw ConfigError("pathloss_intercept_db", "path-loss parameters must be finite");
    if (!std::isfinite(rician_k_intercept_db) || !std::isfinite(rician_k_slope_db_per_m))
        throw ConfigError("rician_k_intercept_db", "Rician-factor parameters must be finite");

    if (!bs_positions.empty()) {
        if (static_cast<int>(bs_positions.size()) != num_cells)
            throw ConfigError("bs_positions", "must list exactly L positions");
    } else {
        const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_cells))));
        if (side * side != num_cells)
            throw ConfigError("L", "grid layout needs a perfect square; give bs_positions otherwise");
    }
}

ChannelStatistics::ChannelStatistics(int num_cells, int users_per_cell, int antennas)
    : num_cells_(num_cells), users_per_cell_(users_per_cell), antennas_(antennas),
      links_(static_cast<std::size_t>(num_cells) * users_per_cell * num_cells)
{
}

void ChannelStatistics::set_link(int cell, int user, int bs, LinkChannel channel)
{
    channel.second_moment = channel.nlos_cov + channel.los * channel.los.adjoint();
    links_[index(cell, user, bs)] = std::move(channel);
}

ChannelRealization::ChannelRealization(int num_cells, int users_per_cell, int antennas)
    : num_cells_(num_cells), users_per_cell_(users_per_cell), antennas_(antennas),
      channels_(static_cast<std::size_t>(num_cells) * users_per_cell * num_cells, CVec::Zero(antennas)),
      phases_(static_cast<std::size_t>(num_cells) * users_per_cell * num_cells, 0.0)
{
}

CVec steering_vector(int antennas, double azimuth, double elevation, double los_gain)
{
    const double amplitude = std::sqrt(los_gain);
    const double spatial = kPi * std::sin(azimuth) * std::cos(elevation);
    CVec v(antennas);
    for (int m = 0; m < antennas; ++m) v(m) = std::polar(amplitude, spatial * m);
    return v;
}

CMat local_scattering_covariance(int antennas, double azimuth, double asd, double nlos_gain)
{
    // Toeplitz: entry (m, n) depends on m - n only.
    CVec column(antennas);
    const double s = std::sin(azimuth);
    const double c = std::cos(azimuth);
    for (int delta = 0; delta < antennas; ++delta) {
        const double spread = kPi * delta * c;
        column(delta) = nlos_gain * std::polar(std::exp(-0.5 * asd * asd * spread * spread), kPi * delta * s);
    }

    CMat r(antennas, antennas);
    for (int m = 0; m < antennas; ++m) {
        for (int n = 0; n < antennas; ++n) r(m, n) = m >= n ? column(m - n) : std::conj(column(n - m));
    }
    return r;
}

double path_gain(const ScenarioConfig &config, double distance_3d)
{
    const double loss_db =
        config.pathloss_intercept_db + config.pathloss_exponent_db_per_decade * std::log10(distance_3d);
    return std::pow(10.0, -loss_db / 10.0);
}

double rician_factor(const ScenarioConfig &config, double distance_2d)
{
    const double k_db = config.rician_k_intercept_db - config.rician_k_slope_db_per_m * distance_2d;
    return std::pow(10.0, k_db / 10.0);
}

namespace {

std::vector<std::array<double, 2>> bs_layout(const ScenarioConfig &config)
{
    if (!config.bs_positions.empty()) return config.bs_positions;
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(config.num_cells))));
    std::vector<std::array<double, 2>> positions;
    positions.reserve(config.num_cells);
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col)
            positions.push_back({(col + 0.5) * config.cell_side, (row + 0.5) * config.cell_side});
    }
    return positions;
}

std::array<double, 2> drop_user(const ScenarioConfig &config, const std::array<double, 2> &center,
                                const std::vector<std::array<double, 2>> &bss, Rng &rng)
{
    std::uniform_real_distribution<double> offset(-0.5 * config.cell_side, 0.5 * config.cell_side);
    constexpr int kMaxAttempts = 100000;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const std::array<double, 2> p{center[0] + offset(rng), center[1] + offset(rng)};
        bool ok = true;
        for (const auto &bs : bss) {
            if (std::hypot(p[0] - bs[0], p[1] - bs[1]) < config.min_bs_distance) {
                ok = false;
                break;
            }
        }
        if (ok) return p;
    }
    throw ConfigError("min_bs_distance", "no admissible user position inside the cell");
}

} // namespace

ChannelStatistics generate_network(const ScenarioConfig &config, Rng &rng)
{
    config.validate();

    const int num_cells = config.num_cells;
    const int users = config.users_per_cell;
    const int antennas = config.antennas;
    const double asd = config.asd_deg * kPi / 180.0;

    ChannelStatistics stats(num_cells, users, antennas);
    stats.bs_positions = bs_layout(config);
    stats.user_positions.reserve(static_cast<std::size_t>(num_cells) * users);
    for (int l = 0; l < num_cells; ++l) {
        for (int k = 0; k < users; ++k)
            stats.user_positions.push_back(drop_user(config, stats.bs_positions[l], stats.bs_positions, rng));
    }

    std::normal_distribution<double> shadowing(0.0, 1.0);
    for (int l = 0; l < num_cells; ++l) {
        for (int k = 0; k < users; ++k) {
            const auto &user = stats.user_positions[static_cast<std::size_t>(l) * users + k];
            for (int r = 0; r < num_cells; ++r) {
                const auto &bs = stats.bs_positions[r];
                const double dx = user[0] - bs[0];
                const double dy = user[1] - bs[1];
                const double d2 = std::hypot(dx, dy);
                const double d3 = std::hypot(d2, config.height_diff_m);

                double gain = path_gain(config, d3);
                if (config.shadow_fading_std_db > 0.0)
                    gain *= std::pow(10.0, config.shadow_fading_std_db * shadowing(rng) / 10.0);

                LinkChannel link;
                link.distance_2d = d2;
                link.azimuth = std::atan2(dy, dx);
                link.elevation = std::atan2(config.height_diff_m, d2);

                if (config.fading == FadingKind::RayleighUncorrelated) {
                    link.los_gain = 0.0;
                    link.nlos_gain = gain;
                    link.los = CVec::Zero(antennas);
                    link.nlos_cov = gain * CMat::Identity(antennas, antennas);
                } else {
                    const double kf = rician_factor(config, d2);
                    const double los_fraction = std::clamp(kf / (1.0 + kf), 0.0, 1.0);
                    link.los_gain = gain * los_fraction;
                    link.nlos_gain = gain * (1.0 - los_fraction);
                    link.los = steering_vector(antennas, link.azimuth, link.elevation, link.los_gain);
                    const double effective = std::asin(std::sin(link.azimuth) * std::cos(link.elevation));
                    link.nlos_cov = local_scattering_covariance(antennas, effective, asd, link.nlos_gain);
                }
                stats.set_link(l, k, r, std::move(link));
            }
        }
    }
    return stats;
}

ChannelStatistics generate_network(const ScenarioConfig &config)
{
    Rng rng(config.seed);
    return generate_network(config, rng);
}

CMat hermitian_sqrt(const CMat &cov)
{
    Eigen::SelfAdjointEigenSolver<CMat> eig(cov);
    if (eig.info() != Eigen::Success) throw StatisticsError("eigendecomposition of covariance failed");
    const double trace = cov.trace().real();
    RVec values = eig.eigenvalues();
    const double floor = -1e-10 * std::abs(trace);
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values(i) < floor)
            throw StatisticsError("covariance is indefinite: eigenvalue " + std::to_string(values(i)));
        values(i) = std::sqrt(std::max(values(i), 0.0));
    }
    return eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().adjoint();
}

ChannelSampler::ChannelSampler(const ChannelStatistics &stats) : stats_(&stats)
{
    const int l_count = stats.num_cells();
    const int k_count = stats.users_per_cell();
    sqrt_factors_.reserve(static_cast<std::size_t>(l_count) * k_count * l_count);
    for (int l = 0; l < l_count; ++l)
        for (int k = 0; k < k_count; ++k)
            for (int r = 0; r < l_count; ++r) sqrt_factors_.push_back(hermitian_sqrt(stats.nlos_cov(l, k, r)));
}

ChannelRealization ChannelSampler::sample(Rng &rng) const
{
    ChannelRealization out(stats_->num_cells(), stats_->users_per_cell(), stats_->antennas());
    sample_into(out, rng);
    return out;
}

void ChannelSampler::sample_into(ChannelRealization &out, Rng &rng) const
{
    const int l_count = stats_->num_cells();
    const int k_count = stats_->users_per_cell();
    const int antennas = stats_->antennas();
    if (out.num_cells() != l_count || out.users_per_cell() != k_count || out.antennas() != antennas)
        out = ChannelRealization(l_count, k_count, antennas);

    std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
    std::size_t idx = 0;
    for (int l = 0; l < l_count; ++l) {
        for (int k = 0; k < k_count; ++k) {
            for (int r = 0; r < l_count; ++r, ++idx) {
                const double theta = phase(rng);
                out.phase(l, k, r) = theta;
                out.channel(l, k, r).noalias() =
                    std::polar(1.0, theta) * stats_->los(l, k, r) +
                    sqrt_factors_[idx] * complex_normal_vector(antennas, rng);
            }
        }
    }
}

ChannelRealization sample_channels(const ChannelStatistics &stats, Rng &rng)
{
    return ChannelSampler(stats).sample(rng);
}

} // namespace lsfp
