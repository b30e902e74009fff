#include "outlier_bandit/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace outlier_bandit {

Bounds::Bounds(double a, double b) : a_(a), b_(b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || !(a < b)) {
        throw std::invalid_argument("bounds must satisfy 0 <= a < b, got [" + std::to_string(a) +
                                    ", " + std::to_string(b) + "]");
    }
}

void ProblemInstance::validate() const {
    if (means.empty()) throw std::invalid_argument("instance has no arms");
    if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("k must be finite and >= 0");
    for (std::size_t i = 0; i < means.size(); ++i) {
        if (!std::isfinite(means[i]) || !bounds.contains(means[i])) {
            throw std::invalid_argument("mean of arm " + std::to_string(i + 1) + " (" +
                                        std::to_string(means[i]) + ") is outside the bounds");
        }
    }
}

ProblemInstance make_instance(std::vector<double> means, Bounds bounds, double k) {
    ProblemInstance instance{std::move(means), bounds, k};
    instance.validate();
    return instance;
}

// Long double keeps n*c exact for repeated values, so equal means give
// sigma == 0 exactly and ties at theta stay ties.
double mean_of_means(std::span<const double> means) {
    long double sum = 0.0L;
    for (double y : means) sum += y;
    return static_cast<double>(sum / static_cast<long double>(means.size()));
}

double sigma_of_means(std::span<const double> means) {
    long double sum = 0.0L;
    for (double y : means) sum += y;
    const long double mu = sum / static_cast<long double>(means.size());
    long double ss = 0.0L;
    for (double y : means) ss += (y - mu) * (y - mu);
    return static_cast<double>(std::sqrt(ss / static_cast<long double>(means.size())));
}

double true_threshold(const ProblemInstance& instance) {
    return mean_of_means(instance.means) + instance.k * sigma_of_means(instance.means);
}

std::vector<std::size_t> true_outliers(const ProblemInstance& instance) {
    const double theta = true_threshold(instance);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < instance.means.size(); ++i) {
        if (instance.means[i] >= theta) out.push_back(i);
    }
    return out;
}

double min_gap(std::span<const double> means, double k) {
    const double theta = mean_of_means(means) + k * sigma_of_means(means);
    double gap = INFINITY;
    for (double y : means) gap = std::min(gap, std::abs(y - theta));
    return gap;
}

double min_gap(const ProblemInstance& instance) { return min_gap(instance.means, instance.k); }

std::string_view to_string(RewardModel model) {
    switch (model) {
        case RewardModel::bernoulli_scaled: return "bernoulli";
        case RewardModel::point_mass: return "point-mass";
    }
    return "unknown";
}

RewardModel parse_reward_model(std::string_view text) {
    if (text == "bernoulli" || text == "bernoulli-scaled") return RewardModel::bernoulli_scaled;
    if (text == "point-mass" || text == "point_mass") return RewardModel::point_mass;
    throw std::invalid_argument("unknown reward model '" + std::string(text) + "'");
}

Environment::Environment(ProblemInstance instance, RewardModel model, std::uint64_t seed)
    : instance_(std::move(instance)), model_(model), rng_(seed) {
    instance_.validate();
    success_prob_.reserve(instance_.means.size());
    for (double y : instance_.means) {
        success_prob_.push_back((y - instance_.bounds.a()) / instance_.bounds.range());
    }
}

void Environment::throw_bad_arm(std::size_t arm) const {
    throw std::out_of_range("arm index " + std::to_string(arm) + " out of range for " +
                            std::to_string(success_prob_.size()) + " arms");
}

}  // namespace outlier_bandit
