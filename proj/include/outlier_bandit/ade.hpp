#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "outlier_bandit/conc.hpp"
#include "outlier_bandit/env.hpp"

namespace outlier_bandit {

/// What a learner is allowed to know: arm count, reward bounds and k.
/// Arm means stay inside the Environment.
struct ProblemView {
    std::size_t arms = 0;
    Bounds bounds;
    double k = 0.0;

    static ProblemView of(const ProblemInstance& instance) {
        return {instance.arms(), instance.bounds, instance.k};
    }
};

enum class Verdict { outlier, normal, undecided };

/// Interval-separation rule. Normal iff arm.upper <= threshold.lower,
/// outlier iff arm.lower >= threshold.upper, both non-strict. Normal is
/// tested first, which only matters for zero-width intervals.
Verdict classify(Interval arm, Interval threshold);

/// Outcome of one run of any of the identification algorithms.
struct RunResult {
    std::vector<std::size_t> outliers;   ///< ascending, 0-based
    std::vector<std::size_t> normals;    ///< ascending, 0-based
    std::vector<std::size_t> undecided;  ///< non-empty only when !terminated
    bool terminated = false;             ///< false: pull budget exhausted
    std::uint64_t total_pulls = 0;
    std::uint64_t theta_pairs = 0;        ///< random paired samples (ADE only)
    std::uint64_t sequential_rounds = 0;  ///< ADE: m_a. Baselines: sweeps.
    std::uint64_t rounds = 0;             ///< sampling blocks, counted in batch units
    std::vector<std::uint64_t> per_arm_pulls;      ///< sequential pulls only
    std::vector<std::uint64_t> elimination_round;  ///< 0 when never decided
    /// Smallest r_theta / r_a seen after initialization (ADE only; +inf otherwise).
    double min_radius_ratio = kInfiniteRadius;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

struct AdeOptions {
    double delta = 0.1;
    std::uint64_t batch = 1;
    std::uint64_t max_pulls = 1'000'000'000;
};

/// State after one loop iteration, handed to an optional observer.
struct RoundSnapshot {
    std::uint64_t round = 0;
    std::uint64_t sequential_rounds = 0;
    std::uint64_t theta_pairs = 0;
    std::uint64_t total_pulls = 0;
    bool sampled_threshold = false;
    double arm_radius = 0.0;
    double threshold_radius = 0.0;
    double threshold_hat = 0.0;
    std::size_t candidates = 0;
    std::size_t outliers = 0;
    std::size_t normals = 0;
};

using RoundObserver = std::function<void(const RoundSnapshot&)>;

/// Adaptive double exploration. Each iteration draws `batch` random pairs
/// for the threshold when r_a <= r_theta, and otherwise pulls every
/// candidate `batch` times; decided arms leave the candidate set for good.
RunResult run_ade(const ProblemView& problem, Environment& env, const AdeOptions& options,
                  const RoundObserver& observer = {});

struct ArmDiagnostic {
    std::size_t arm = 0;
    double gap = 0.0;
    std::uint64_t pulls = 0;
    double pulls_gap_sq = 0.0;  ///< pulls * gap^2
    double log_term = 0.0;      ///< ln(sqrt(n/delta) * max(1, (k/sigma)^2) / gap^2)
};

struct Diagnostics {
    std::vector<ArmDiagnostic> arms;
    std::size_t last_eliminated = 0;
    double pair_ratio = 0.0;        ///< theta_pairs / pulls of the last eliminated arm
    double pair_ratio_bound = 0.0;  ///< 4 (1 + sqrt(2) coef k / (R sigma))^2
    bool pair_ratio_ok = false;
    double min_radius_ratio = 0.0;
    bool radius_interleave_ok = false;  ///< min r_theta / r_a >= 1/2
};

/// Empirical sample-complexity report for a terminated run. Throws
/// std::invalid_argument on a non-terminated result.
Diagnostics diagnose(const RunResult& result, const ProblemInstance& instance, double delta);

}  // namespace outlier_bandit
