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

#include "lsfp/se_eval.hpp"

#include <cmath>

namespace lsfp {

SupportMask::SupportMask(int num_cells, int users_per_cell, bool allowed)
    : num_cells_(num_cells), users_per_cell_(users_per_cell),
      bits_(static_cast<std::size_t>(num_cells) * users_per_cell * num_cells, allowed ? 1 : 0)
{
}

SupportMask SupportMask::full(int num_cells, int users_per_cell)
{
    return SupportMask(num_cells, users_per_cell, true);
}

SupportMask SupportMask::single_layer(int num_cells, int users_per_cell)
{
    SupportMask mask(num_cells, users_per_cell, false);
    for (int l = 0; l < num_cells; ++l)
        for (int k = 0; k < users_per_cell; ++k) mask.set(l, k, l, true);
    return mask;
}

int SupportMask::support_size(int cell, int user) const
{
    int n = 0;
    for (int r = 0; r < num_cells_; ++r) n += allowed(cell, user, r) ? 1 : 0;
    return n;
}

LsfpWeights::LsfpWeights(SupportMask mask)
    : mask_(std::move(mask)),
      a_(static_cast<std::size_t>(mask_.num_cells()) * mask_.users_per_cell(), CVec::Zero(mask_.num_cells()))
{
}

void LsfpWeights::apply_mask()
{
    for (int l = 0; l < num_cells(); ++l)
        for (int k = 0; k < users_per_cell(); ++k)
            for (int r = 0; r < num_cells(); ++r)
                if (!mask_.allowed(l, k, r)) a(l, k)(r) = 0.0;
}

namespace {

double quad_form(const CVec &a, const CMat &c)
{
    return a.dot(c * a).real();
}

} // namespace

SinrBreakdown sinr_breakdown(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2)
{
    SinrBreakdown out;
    const CVec &own = weights.a(cell, user);
    out.ds_power = std::norm(own.dot(ls.b(cell, user)));

    const double bu = quad_form(own, ls.c(cell, user, user)) - out.ds_power;
    if (bu < -1e-10 * std::max(1.0, out.ds_power))
        throw InvariantViolation("negative beamforming-uncertainty power " + std::to_string(bu) +
                                 ": C(l,k,k) inconsistent with b(l,k)");
    out.bu_power = std::max(bu, 0.0);

    for (int r = 0; r < weights.num_cells(); ++r) {
        if (r != cell) out.pc_power += quad_form(weights.a(r, user), ls.c(cell, user, user));
        for (int kp = 0; kp < weights.users_per_cell(); ++kp) {
            if (kp == user) continue;
            out.ni_power += quad_form(weights.a(r, kp), ls.c(cell, user, kp));
        }
    }
    out.sinr = out.ds_power / (out.bu_power + out.pc_power + out.ni_power + sigma2);
    return out;
}

double spectral_efficiency(double sinr, int tau_c, int tau_p)
{
    const double prelog = static_cast<double>(tau_c - tau_p) / tau_c;
    return prelog * std::log2(1.0 + sinr);
}

double received_power(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2)
{
    double total = sigma2;
    for (int r = 0; r < weights.num_cells(); ++r)
        for (int kp = 0; kp < weights.users_per_cell(); ++kp)
            total += quad_form(weights.a(r, kp), ls.c(cell, user, kp));
    return total;
}

double mse_value(cd u, int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2)
{
    const cd gain = weights.a(cell, user).dot(ls.b(cell, user));
    const double e = std::norm(u) * received_power(cell, user, weights, ls, sigma2) -
                     2.0 * (std::conj(u) * gain).real() + 1.0;
    return e < 0.0 && e > -1e-12 ? 0.0 : e;
}

double power_used(int bs, const LsfpWeights &weights, const LinkStatistics &ls)
{
    double total = 0.0;
    for (int k = 0; k < weights.users_per_cell(); ++k) {
        double share = 0.0;
        for (int r = 0; r < weights.num_cells(); ++r) share += std::norm(weights.a(r, k)(bs));
        total += ls.omega(bs, k) * share;
    }
    return total;
}

} // namespace lsfp
