#pragma once

// Round-robin (RR) and weighted round-robin (WRR) outlier identification.
// Both estimate the threshold from the per-arm empirical means, so every arm
// keeps being sampled until the last one is decided.

#include <cstddef>
#include <cstdint>
#include <span>

#include "outlier_bandit/ade.hpp"

namespace outlier_bandit {

/// n / sum(1 / m_i). Throws std::invalid_argument on an empty list or a zero count.
double harmonic_mean(std::span<const std::uint64_t> counts);

/// 6 delta / (pi^2 (n + 1) t^2)
double rr_delta_t(double delta, std::size_t arms, std::uint64_t t);
double rr_log_inv_delta_t(double delta, std::size_t arms, std::uint64_t t);

/// l(k) = [sqrt((1 + k sqrt(n-1))^2 / n) + sqrt(k^2 / (2 ln(pi^2 n^3 / (6 dt))))]^2,
/// with dt = rr_delta_t(delta, n, t).
double rr_spread_factor(std::size_t arms, double k, double delta, std::uint64_t t);

/// R sqrt(l(k) / (2 h(m)) ln(1/dt)).
double rr_threshold_radius(std::span<const std::uint64_t> counts, std::size_t arms, double k,
                           double range, double delta, std::uint64_t t);

struct BaselineOptions {
    double delta = 0.1;
    std::uint64_t batch = 1000;
    std::uint64_t weight = 2;  ///< WRR only: undetermined arms get weight * batch pulls per sweep
    std::uint64_t max_pulls = 1'000'000'000;
};

RunResult run_rr(const ProblemView& problem, Environment& env, const BaselineOptions& options);
RunResult run_wrr(const ProblemView& problem, Environment& env, const BaselineOptions& options);

}  // namespace outlier_bandit
