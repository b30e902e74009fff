#include "outlier_bandit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace outlier_bandit {

namespace {

constexpr double kPiSq = std::numbers::pi * std::numbers::pi;

double spread_factor_from_log(std::size_t arms, double k, double log_inv_dt) {
    const double n = static_cast<double>(arms);
    const double head = (1.0 + k * std::sqrt(n - 1.0)) / std::sqrt(n);
    const double log_arg = std::log(kPiSq * n * n * n / 6.0) + log_inv_dt;
    const double tail = std::sqrt(k * k / (2.0 * log_arg));
    return (head + tail) * (head + tail);
}

double radius_from_log(double harmonic, std::size_t arms, double k, double range, double log_inv_dt) {
    const double l = spread_factor_from_log(arms, k, log_inv_dt);
    return range * std::sqrt(l / (2.0 * harmonic) * log_inv_dt);
}

RunResult run_round_robin(const ProblemView& problem, Environment& env, const BaselineOptions& options,
                          std::uint64_t weight) {
    if (!(options.delta > 0.0 && options.delta < 1.0)) {
        throw std::invalid_argument("delta must lie in (0, 1)");
    }
    if (options.batch == 0) throw std::invalid_argument("batch must be >= 1");
    if (weight == 0) throw std::invalid_argument("weight must be >= 1");
    if (problem.arms == 0 || problem.arms != env.arms()) {
        throw std::invalid_argument("problem arm count does not match the environment");
    }

    const std::size_t n = problem.arms;
    const double range = problem.bounds.range();
    const double k = problem.k;

    std::vector<ArmStats> stats(n);
    std::vector<std::uint64_t> counts(n, 0);
    std::vector<double> means(n, 0.0);
    std::vector<char> decided(n, 0);
    std::size_t remaining = n;
    std::uint64_t sweeps = 0;
    std::uint64_t total = 0;

    RunResult result;
    result.elimination_round.assign(n, 0);

    while (remaining > 0) {
        if (total >= options.max_pulls) break;

        for (std::size_t arm = 0; arm < n; ++arm) {
            const std::uint64_t pulls = decided[arm] ? options.batch : weight * options.batch;
            ArmStats& s = stats[arm];
            for (std::uint64_t p = 0; p < pulls; ++p) s.add(env.pull(arm));
            total += pulls;
            counts[arm] = s.pulls;
            means[arm] = arm_mean(s);
        }
        ++sweeps;

        // Threshold from all n empirical means.
        const double theta = mean_of_means(means) + k * sigma_of_means(means);
        const double log_dt = rr_log_inv_delta_t(options.delta, n, sweeps);
        const double r_theta = radius_from_log(harmonic_mean(counts), n, k, range, log_dt);
        const Interval th = confidence_bounds(theta, r_theta);

        for (std::size_t arm = 0; arm < n; ++arm) {
            if (decided[arm]) continue;
            const double r = arm_radius_from_log(counts[arm], range, log_dt);
            const Verdict v = classify(confidence_bounds(means[arm], r), th);
            if (v == Verdict::undecided) continue;
            decided[arm] = 1;
            --remaining;
            result.elimination_round[arm] = sweeps;
            (v == Verdict::outlier ? result.outliers : result.normals).push_back(arm);
        }
    }

    for (std::size_t arm = 0; arm < n; ++arm) {
        if (!decided[arm]) result.undecided.push_back(arm);
    }
    std::sort(result.outliers.begin(), result.outliers.end());
    std::sort(result.normals.begin(), result.normals.end());
    result.terminated = remaining == 0;
    result.total_pulls = total;
    result.theta_pairs = 0;
    result.sequential_rounds = sweeps;
    result.rounds = sweeps;
    result.per_arm_pulls = std::move(counts);
    return result;
}

}  // namespace

double harmonic_mean(std::span<const std::uint64_t> counts) {
    if (counts.empty()) throw std::invalid_argument("harmonic mean of an empty list");
    double inv = 0.0;
    for (auto c : counts) {
        if (c == 0) throw std::invalid_argument("harmonic mean needs counts >= 1");
        inv += 1.0 / static_cast<double>(c);
    }
    return static_cast<double>(counts.size()) / inv;
}

double rr_delta_t(double delta, std::size_t arms, std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("round index t must be >= 1");
    const double td = static_cast<double>(t);
    return 6.0 * delta / (kPiSq * (static_cast<double>(arms) + 1.0) * td * td);
}

double rr_log_inv_delta_t(double delta, std::size_t arms, std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("round index t must be >= 1");
    return std::log(kPiSq * (static_cast<double>(arms) + 1.0) / (6.0 * delta)) +
           2.0 * std::log(static_cast<double>(t));
}

double rr_spread_factor(std::size_t arms, double k, double delta, std::uint64_t t) {
    if (arms == 0) throw std::invalid_argument("arms must be >= 1");
    return spread_factor_from_log(arms, k, rr_log_inv_delta_t(delta, arms, t));
}

double rr_threshold_radius(std::span<const std::uint64_t> counts, std::size_t arms, double k,
                           double range, double delta, std::uint64_t t) {
    if (arms == 0) throw std::invalid_argument("arms must be >= 1");
    return radius_from_log(harmonic_mean(counts), arms, k, range, rr_log_inv_delta_t(delta, arms, t));
}

RunResult run_rr(const ProblemView& problem, Environment& env, const BaselineOptions& options) {
    return run_round_robin(problem, env, options, 1);
}

RunResult run_wrr(const ProblemView& problem, Environment& env, const BaselineOptions& options) {
    return run_round_robin(problem, env, options, options.weight);
}

}  // namespace outlier_bandit
