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

#include "lsfp/config_io.hpp"
#include "lsfp/scenario.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

using namespace lsfp;

TEST_CASE("steering vector examples")
{
    const CVec one = steering_vector(1, 0.7, 0.2, 4.0);
    CHECK(std::abs(one(0) - cd(2.0)) < 1e-15);

    const CVec flat = steering_vector(3, 0.0, 0.3, 1.0);
    for (int m = 0; m < 3; ++m) CHECK(std::abs(flat(m) - cd(1.0)) < 1e-15);

    const CVec broadside = steering_vector(2, kPi / 2, 0.0, 1.0);
    CHECK(std::abs(broadside(0) - cd(1.0)) < 1e-15);
    CHECK(std::abs(broadside(1) - cd(-1.0)) < 1e-15);
}

TEST_CASE("steering vector entries share one magnitude")
{
    Rng rng(5);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    for (int trial = 0; trial < 20; ++trial) {
        const double gain = 0.1 + trial;
        const CVec a = steering_vector(16, angle(rng), angle(rng) / 4, gain);
        for (int m = 0; m < 16; ++m) CHECK(std::abs(a(m)) == doctest::Approx(std::sqrt(gain)).epsilon(1e-14));
    }
}

TEST_CASE("local scattering covariance examples")
{
    const CMat one = local_scattering_covariance(1, 0.4, 0.2, 3.0);
    CHECK(std::abs(one(0, 0) - cd(3.0)) < 1e-15);

    const CMat r = local_scattering_covariance(6, 0.4, 0.2, 2.5);
    for (int m = 0; m < 6; ++m) CHECK(std::abs(r(m, m) - cd(2.5)) < 1e-14);

    const CMat rank_one = local_scattering_covariance(2, 0.0, 0.0, 1.5);
    CHECK((rank_one - CMat::Constant(2, 2, 1.5)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("zero angular spread collapses to the steering outer product")
{
    // This pins the sign convention of the off-diagonal phase.
    for (double az : {-1.1, -0.3, 0.2, 0.9}) {
        const CVec a = steering_vector(5, az, 0.0, 1.0);
        const CMat r = local_scattering_covariance(5, az, 0.0, 1.0);
        CHECK((r - a * a.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("local scattering covariance is Hermitian PSD")
{
    Rng rng(6);
    std::uniform_real_distribution<double> angle(-kPi, kPi);
    std::uniform_real_distribution<double> spread(0.0, 0.8);
    for (int trial = 0; trial < 50; ++trial) {
        const CMat r = local_scattering_covariance(12, angle(rng), spread(rng), 1.0 + trial);
        CHECK((r - r.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + trial));
        Eigen::SelfAdjointEigenSolver<CMat> eig(r);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * r.trace().real());
    }
}

TEST_CASE("path gain and Rician factor follow the configured dB models")
{
    ScenarioConfig c;
    CHECK(path_gain(c, 1.0) == doctest::Approx(std::pow(10.0, -3.05)));
    CHECK(path_gain(c, 100.0) == doctest::Approx(std::pow(10.0, -(30.5 + 73.4) / 10.0)));
    CHECK(rician_factor(c, 0.0) == doctest::Approx(std::pow(10.0, 1.3)));
    CHECK(rician_factor(c, 100.0) == doctest::Approx(std::pow(10.0, 1.0)));
}

TEST_CASE("config validation names the offending field")
{
    auto field_of = [](ScenarioConfig c) {
        try {
            c.validate();
        } catch (const ConfigError &e) {
            return e.field();
        }
        return std::string();
    };
    ScenarioConfig ok;
    CHECK(field_of(ok).empty());

    ScenarioConfig c = ok;
    c.pilot_length = 4;
    CHECK(field_of(c) == "tau_p");
    c = ok;
    c.noise_power = 0.0;
    CHECK(field_of(c) == "sigma2");
    c = ok;
    c.num_cells = 3;
    CHECK(field_of(c) == "L");
    c = ok;
    c.max_bs_power = -1.0;
    CHECK(field_of(c) == "rho_d");
    c = ok;
    c.min_bs_distance = 0.0;
    CHECK(field_of(c) == "min_bs_distance");
}

TEST_CASE("JSON config round-trips and rejects unknown keys")
{
    const ScenarioConfig c = test::small_config(2, 2, 4, 9);
    const ScenarioConfig back = scenario_from_json(scenario_to_json(c));
    CHECK(scenario_to_json(back) == scenario_to_json(c));

    nlohmann::json doc = scenario_to_json(c);
    doc["antenna_count"] = 5;
    CHECK_THROWS_AS(scenario_from_json(doc), ConfigError);

    nlohmann::json bad = {{"L", "four"}};
    try {
        scenario_from_json(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError &e) {
        CHECK(e.field() == "L");
    }
}

TEST_CASE("generate_network is deterministic given the seed")
{
    ScenarioConfig c;
    c.num_cells = 4;
    c.users_per_cell = 2;
    c.pilot_length = 2;
    c.antennas = 8;
    c.seed = 77;
    const ChannelStatistics a = generate_network(c);
    const ChannelStatistics b = generate_network(c);
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 2; ++k)
            for (int r = 0; r < 4; ++r) {
                CHECK(a.los(l, k, r) == b.los(l, k, r));
                CHECK(a.nlos_cov(l, k, r) == b.nlos_cov(l, k, r));
            }
    c.seed = 78;
    const ChannelStatistics other = generate_network(c);
    CHECK(other.los(0, 0, 0) != a.los(0, 0, 0));
}

TEST_CASE("single cell single user network has one link")
{
    ScenarioConfig c;
    c.num_cells = 1;
    c.users_per_cell = 1;
    c.pilot_length = 1;
    c.antennas = 4;
    const ChannelStatistics s = generate_network(c);
    CHECK(s.num_cells() == 1);
    CHECK(s.users_per_cell() == 1);
    CHECK(s.user_positions.size() == 1);
    CHECK(s.los(0, 0, 0).size() == 4);
}

TEST_CASE("network statistics satisfy their structural invariants")
{
    ScenarioConfig c;
    c.num_cells = 4;
    c.users_per_cell = 3;
    c.pilot_length = 3;
    c.antennas = 10;
    c.seed = 5;
    const ChannelStatistics s = generate_network(c);
    for (int l = 0; l < 4; ++l)
        for (int k = 0; k < 3; ++k) {
            const auto &pos = s.user_positions[l * 3 + k];
            for (int r = 0; r < 4; ++r) {
                const double dx = pos[0] - s.bs_positions[r][0];
                const double dy = pos[1] - s.bs_positions[r][1];
                CHECK(std::hypot(dx, dy) >= c.min_bs_distance);

                const CMat &R = s.nlos_cov(l, k, r);
                const CVec &g = s.los(l, k, r);
                const CMat &Rbar = s.second_moment(l, k, r);
                const double scale = Rbar.cwiseAbs().maxCoeff();
                CHECK((R - R.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
                CHECK((Rbar - R - g * g.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
                CHECK(std::abs(Rbar.trace().real() - R.trace().real() - g.squaredNorm()) <=
                      1e-12 * Rbar.trace().real());
                Eigen::SelfAdjointEigenSolver<CMat> eig(R);
                CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * R.trace().real());
            }
        }
}

TEST_CASE("uncorrelated Rayleigh mode has no LOS and scaled identity covariance")
{
    ScenarioConfig c;
    c.num_cells = 4;
    c.users_per_cell = 2;
    c.pilot_length = 2;
    c.antennas = 6;
    c.fading = FadingKind::RayleighUncorrelated;
    const ChannelStatistics s = generate_network(c);
    for (int l = 0; l < 4; ++l)
        for (int r = 0; r < 4; ++r) {
            CHECK(s.los(l, 1, r).squaredNorm() == 0.0);
            const CMat &R = s.nlos_cov(l, 1, r);
            const double gain = R(0, 0).real();
            CHECK(gain > 0.0);
            CHECK((R - gain * CMat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("hermitian_sqrt squares back and rejects indefinite input")
{
    Rng rng(8);
    const CMat a = test::random_psd(5, rng);
    const CMat s = hermitian_sqrt(a);
    CHECK((s * s - a).cwiseAbs().maxCoeff() < 1e-12);
    CMat bad = a;
    bad(0, 0) -= 10.0;
    CHECK_THROWS_AS(hermitian_sqrt(bad), StatisticsError);
}

namespace {

ChannelStatistics one_link(const CVec &los, const CMat &cov)
{
    ChannelStatistics s(1, 1, static_cast<int>(los.size()));
    LinkChannel link;
    link.los = los;
    link.nlos_cov = cov;
    s.set_link(0, 0, 0, link);
    s.bs_positions = {{0.0, 0.0}};
    s.user_positions = {{10.0, 0.0}};
    return s;
}

} // namespace

TEST_CASE("pure LOS draws keep the LOS magnitudes")
{
    const CVec los = steering_vector(4, 0.3, 0.1, 2.0);
    const ChannelStatistics s = one_link(los, CMat::Zero(4, 4));
    Rng rng(3);
    for (int i = 0; i < 10; ++i) {
        const ChannelRealization g = sample_channels(s, rng);
        const double theta = g.phase(0, 0, 0);
        CHECK(theta >= 0.0);
        CHECK(theta < 2.0 * kPi);
        for (int m = 0; m < 4; ++m) CHECK(std::abs(g.channel(0, 0, 0)(m)) == doctest::Approx(std::abs(los(m))));
    }
}

TEST_CASE("sampled channels have zero mean and second moment Rbar")
{
    Rng setup(4);
    const int M = 3;
    const CVec los = steering_vector(M, 0.5, 0.0, 1.5);
    const CMat cov = test::random_psd(M, setup);
    const ChannelStatistics s = one_link(los, cov);
    const CMat rbar = s.second_moment(0, 0, 0);

    const int n = 100000;
    ChannelSampler sampler(s);
    ChannelRealization g(1, 1, M);
    Rng rng(10);
    CVec sum = CVec::Zero(M);
    CVec sum_sq = CVec::Zero(M);
    CMat moment = CMat::Zero(M, M);
    CMat moment_sq = CMat::Zero(M, M); // per-entry |x|^2 accumulation
    for (int i = 0; i < n; ++i) {
        sampler.sample_into(g, rng);
        const CVec &v = g.channel(0, 0, 0);
        sum += v;
        sum_sq += v.cwiseAbs2().cast<cd>();
        const CMat outer = v * v.adjoint();
        moment += outer;
        moment_sq += outer.cwiseAbs2().cast<cd>();
    }
    for (int m = 0; m < M; ++m) {
        const double se = std::sqrt(sum_sq(m).real() / n / n);
        CHECK(std::abs(sum(m) / static_cast<double>(n)) < 5.0 * se);
    }
    for (int i = 0; i < M; ++i)
        for (int j = 0; j < M; ++j) {
            const cd mean = moment(i, j) / static_cast<double>(n);
            const double var = moment_sq(i, j).real() / n - std::norm(mean);
            CHECK(std::abs(mean - rbar(i, j)) < 5.0 * std::sqrt(var / n));
        }
}
