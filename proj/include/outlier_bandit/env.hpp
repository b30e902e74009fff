#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "outlier_bandit/rng.hpp"

namespace outlier_bandit {

/// Reward support [a, b] with 0 <= a < b.
class Bounds {
public:
    Bounds() = default;
    Bounds(double a, double b);

    double a() const { return a_; }
    double b() const { return b_; }
    /// b - a
    double range() const { return b_ - a_; }
    /// b^2 - a^2
    double square_range() const { return b_ * b_ - a_ * a_; }
    /// Coefficient of the variance deviation bound: (b^2 - a^2) + 2b(b - a).
    double variance_coef() const { return square_range() + 2.0 * b_ * range(); }

    bool contains(double x) const { return a_ <= x && x <= b_; }

    friend bool operator==(const Bounds&, const Bounds&) = default;

private:
    double a_ = 0.0;
    double b_ = 1.0;
};

/// Arm means plus the threshold multiplier. Ground truth for simulation.
struct ProblemInstance {
    std::vector<double> means;
    Bounds bounds;
    double k = 0.0;

    std::size_t arms() const { return means.size(); }

    /// Throws std::invalid_argument when a mean is outside the bounds,
    /// the instance is empty, or k is negative / not finite.
    void validate() const;
};

ProblemInstance make_instance(std::vector<double> means, Bounds bounds, double k);

/// theta = mu + k * sigma, sigma the population (divide-by-n) deviation.
double true_threshold(const ProblemInstance& instance);

/// Population mean and deviation of the arm means.
double mean_of_means(std::span<const double> means);
double sigma_of_means(std::span<const double> means);

/// Arms with mean >= theta, ascending (0-based).
std::vector<std::size_t> true_outliers(const ProblemInstance& instance);

/// min_i |y_i - theta|
double min_gap(const ProblemInstance& instance);
double min_gap(std::span<const double> means, double k);

enum class RewardModel {
    bernoulli_scaled,  ///< a with prob 1-p, b with prob p, p = (y - a) / (b - a)
    point_mass,        ///< always y
};

std::string_view to_string(RewardModel model);
RewardModel parse_reward_model(std::string_view text);

struct PairDraw {
    std::size_t arm;
    double first;
    double second;
};

/// Simulated bandit. Single owner; every pull advances the generator.
class Environment {
public:
    Environment(ProblemInstance instance, RewardModel model, std::uint64_t seed);

    /// One draw from `arm` (0-based). Throws std::out_of_range.
    double pull(std::size_t arm) {
        if (arm >= success_prob_.size()) throw_bad_arm(arm);
        return draw(arm);
    }

    /// Uniformly random arm over all n arms, pulled twice.
    PairDraw pull_pair_random() {
        const auto arm = static_cast<std::size_t>(rng_.below(success_prob_.size()));
        const double first = draw(arm);
        const double second = draw(arm);
        return {arm, first, second};
    }

    std::size_t arms() const { return success_prob_.size(); }
    const Bounds& bounds() const { return instance_.bounds; }
    RewardModel model() const { return model_; }
    const ProblemInstance& instance() const { return instance_; }

private:
    double draw(std::size_t arm) {
        if (model_ == RewardModel::point_mass) return instance_.means[arm];
        return rng_.uniform01() < success_prob_[arm] ? instance_.bounds.b() : instance_.bounds.a();
    }

    [[noreturn]] void throw_bad_arm(std::size_t arm) const;

    ProblemInstance instance_;
    RewardModel model_;
    std::vector<double> success_prob_;
    Rng rng_;
};

}  // namespace outlier_bandit
