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

#ifndef LSFP_SE_EVAL_HPP
#define LSFP_SE_EVAL_HPP

#include "lsfp/common.hpp"
#include "lsfp/linkstats.hpp"

#include <vector>

namespace lsfp {

/// Which entries of each LSFP vector a_lk may be nonzero.
class SupportMask {
public:
    SupportMask() = default;
    SupportMask(int num_cells, int users_per_cell, bool allowed);

    /// Every entry allowed (two-layer precoding).
    static SupportMask full(int num_cells, int users_per_cell);
    /// Only a_lk^l allowed (single-layer precoding).
    static SupportMask single_layer(int num_cells, int users_per_cell);

    int num_cells() const { return num_cells_; }
    int users_per_cell() const { return users_per_cell_; }

    bool allowed(int cell, int user, int bs) const { return bits_[index(cell, user, bs)] != 0; }
    void set(int cell, int user, int bs, bool allowed) { bits_[index(cell, user, bs)] = allowed ? 1 : 0; }
    int support_size(int cell, int user) const;

    bool operator==(const SupportMask &) const = default;

private:
    std::size_t index(int cell, int user, int bs) const
    {
        return (static_cast<std::size_t>(cell) * users_per_cell_ + user) * num_cells_ + bs;
    }

    int num_cells_ = 0;
    int users_per_cell_ = 0;
    std::vector<unsigned char> bits_;
};

/// LSFP vectors a_lk (entry r is the weight BS r applies to user k of cell l).
class LsfpWeights {
public:
    LsfpWeights() = default;
    explicit LsfpWeights(SupportMask mask);

    int num_cells() const { return mask_.num_cells(); }
    int users_per_cell() const { return mask_.users_per_cell(); }

    CVec &a(int cell, int user) { return a_[pair(cell, user)]; }
    const CVec &a(int cell, int user) const { return a_[pair(cell, user)]; }
    const SupportMask &mask() const { return mask_; }

    /// Zeroes every entry outside the mask.
    void apply_mask();

private:
    std::size_t pair(int l, int k) const { return static_cast<std::size_t>(l) * users_per_cell() + k; }

    SupportMask mask_;
    std::vector<CVec> a_;
};

struct SinrBreakdown {
    double ds_power = 0.0; // desired signal
    double bu_power = 0.0; // beamforming gain uncertainty
    double pc_power = 0.0; // pilot contamination
    double ni_power = 0.0; // non-coherent interference
    double sinr = 0.0;
};

SinrBreakdown sinr_breakdown(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2);

/// ((tau_c - tau_p) / tau_c) * log2(1 + sinr), bits/s/Hz.
double spectral_efficiency(double sinr, int tau_c, int tau_p);

/// sum_{r,k'} a_rk'^H C(l,k,k') a_rk' + sigma^2: everything user (l,k) receives plus noise.
double received_power(int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2);

/// MSE of the estimate u^* y_lk of s_lk.
double mse_value(cd u, int cell, int user, const LsfpWeights &weights, const LinkStatistics &ls, double sigma2);

/// Long-term transmit power of BS `bs`: sum_k omega(bs,k) sum_r |a_rk^bs|^2.
double power_used(int bs, const LsfpWeights &weights, const LinkStatistics &ls);

} // namespace lsfp

#endif
