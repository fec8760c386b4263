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

#ifndef LSFP_COMMON_HPP
#define LSFP_COMMON_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace lsfp {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;

using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

// Error taxonomy. Everything derives from std::runtime_error so callers that
// do not care about the category can catch a single type.

/// Invalid user-supplied configuration. `field()` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string &what)
        : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

/// A factorization or linear solve failed.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Channel statistics are not realizable (e.g. an indefinite covariance).
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that are individually valid but jointly inconsistent.
class InvariantViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap.
class NonConvergenceError : public std::runtime_error {
public:
    NonConvergenceError(const std::string &what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

enum class EstimatorKind { LMMSE, EW_LMMSE, LS };

std::string to_string(EstimatorKind kind);
EstimatorKind estimator_from_string(const std::string &name);

/// Draws one sample of CN(0, 1).
inline cd complex_normal(Rng &rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

/// Vector of i.i.d. CN(0, 1) entries.
CVec complex_normal_vector(Eigen::Index n, Rng &rng);

/// Independent stream for sub-task `index` of a run seeded with `seed`.
Rng derive_rng(std::uint64_t seed, std::uint64_t index);

/// tr(A * B) without forming the product.
inline cd trace_product(const CMat &a, const CMat &b)
{
    return (a.transpose().cwiseProduct(b)).sum();
}

/// Worker count: `requested` if > 0, otherwise hardware concurrency (at least 1).
unsigned resolve_thread_count(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Exceptions from
/// the body are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &body);

} // namespace lsfp

#endif
