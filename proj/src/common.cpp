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

#include "lsfp/common.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace lsfp {

std::string to_string(EstimatorKind kind)
{
    switch (kind) {
    case EstimatorKind::LMMSE: return "LMMSE";
    case EstimatorKind::EW_LMMSE: return "EW_LMMSE";
    case EstimatorKind::LS: return "LS";
    }
    return "?";
}

EstimatorKind estimator_from_string(const std::string &name)
{
    if (name == "LMMSE") return EstimatorKind::LMMSE;
    if (name == "EW_LMMSE" || name == "EW-LMMSE") return EstimatorKind::EW_LMMSE;
    if (name == "LS") return EstimatorKind::LS;
    throw ConfigError("estimator", "unknown estimator '" + name + "'");
}

CVec complex_normal_vector(Eigen::Index n, Rng &rng)
{
    std::normal_distribution<double> dist(0.0, std::sqrt(0.5));
    CVec v(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double re = dist(rng);
        const double im = dist(rng);
        v(i) = cd(re, im);
    }
    return v;
}

Rng derive_rng(std::uint64_t seed, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

unsigned resolve_thread_count(int requested)
{
    if (requested > 0) return static_cast<unsigned>(requested);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body)
{
    if (n == 0) return;
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto &t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace lsfp
