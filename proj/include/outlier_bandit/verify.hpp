#pragma once

// Monte-Carlo checks of the confidence statements behind the algorithms,
// plus brute-force oracles.
//
// Bound ids:
//   L1  |mu_hat - mu| <= r_mu                     nominal 2 dt
//   L2  |sigma_hat^2 - sigma^2| <= eps_sigma      nominal dt
//   L3  |sigma_hat - sigma| <= sqrt(2/U) eps      nominal dt
//   L4  |theta_hat - theta| <= r_theta            nominal 8 dt
//   L5  |y_i - y_hat_i| <= r_i, per arm           nominal 2 dt

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "outlier_bandit/env.hpp"

namespace outlier_bandit {

enum class Bound { l1, l2, l3, l4, l5 };

inline constexpr std::array<Bound, 5> kAllBounds{Bound::l1, Bound::l2, Bound::l3, Bound::l4, Bound::l5};

std::string_view to_string(Bound bound_id);
double nominal_rate(Bound bound_id, double dt);

struct CoverageOptions {
    RewardModel model = RewardModel::bernoulli_scaled;
    std::uint64_t seed = 0;
    /// Fault-injection hook: multiplies r_theta in the L4 check.
    double theta_radius_scale = 1.0;
};

struct CoverageResult {
    Bound bound_id = Bound::l1;
    std::uint64_t trials = 0;  ///< reps, or reps * n for L5
    std::uint64_t violations = 0;
    double rate = 0.0;
    double nominal = 0.0;
    double bound = 0.0;  ///< nominal + 3 binomial standard errors

    bool passed() const { return rate <= bound; }
};

/// Every bound from one shared simulation: per rep, m random pairs (U built
/// as the running minimum over pair counts 1..m at fixed dt), then m pulls
/// of every arm.
std::array<CoverageResult, 5> coverage_all(const ProblemInstance& instance, std::uint64_t m, double dt,
                                           std::uint64_t reps, const CoverageOptions& options = {});

CoverageResult coverage_test(const ProblemInstance& instance, std::uint64_t m, double dt, std::uint64_t reps,
                             Bound bound_id, const CoverageOptions& options = {});

struct MomentCheck {
    double mean = 0.0;   ///< Monte-Carlo mean of the replicates
    double se = 0.0;     ///< its standard error
    double truth = 0.0;

    /// |mean - truth| <= sigmas * se, with a rounding allowance for se == 0.
    bool within(double sigmas = 3.0) const;
};

struct UnbiasednessResult {
    MomentCheck mu;             ///< s1 / m against mu_y
    MomentCheck second_moment;  ///< s12 / m against (1/n) sum y_i^2
};

UnbiasednessResult unbiasedness_test(const ProblemInstance& instance, std::uint64_t m, std::uint64_t reps,
                                     RewardModel model = RewardModel::bernoulli_scaled, std::uint64_t seed = 0);

struct Classification {
    std::vector<std::size_t> outliers;
    std::vector<std::size_t> normals;
};

Classification brute_force_classify(const ProblemInstance& instance);

inline constexpr std::uint64_t kQuickReps = 10'000;
inline constexpr std::uint64_t kFullReps = 100'000;

struct GridCase {
    std::string label;
    ProblemInstance instance;
    RewardModel model = RewardModel::bernoulli_scaled;
    std::uint64_t m = 0;
    double dt = 0.0;
};

/// Pinned (instance, m, dt) triples, k = 2.
std::vector<GridCase> verify_grid();

struct GridResult {
    GridCase grid_case;
    std::array<CoverageResult, 5> results;
};

std::vector<GridResult> run_verify_grid(std::uint64_t reps, std::uint64_t seed = 0,
                                        double theta_radius_scale = 1.0);

}  // namespace outlier_bandit
