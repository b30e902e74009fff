#include "outlier_bandit/conc.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace outlier_bandit {

namespace {

void require_positive_round(std::uint64_t t) {
    if (t == 0) throw std::invalid_argument("round index t must be >= 1");
}

void require_probability(double dt) {
    if (!(dt > 0.0 && dt < 1.0)) throw std::invalid_argument("dt must lie in (0, 1)");
}

}  // namespace

double delta_t(double delta, std::size_t arms, std::uint64_t t) {
    require_positive_round(t);
    const double td = static_cast<double>(t);
    return 3.0 * delta / ((static_cast<double>(arms) + 4.0) * std::numbers::pi * std::numbers::pi * td * td);
}

double log_inv_delta_t(double delta, std::size_t arms, std::uint64_t t) {
    require_positive_round(t);
    const double base = std::log((static_cast<double>(arms) + 4.0) * std::numbers::pi * std::numbers::pi /
                                 (3.0 * delta));
    return base + 2.0 * std::log(static_cast<double>(t));
}

double arm_mean(const ArmStats& stats) {
    if (stats.pulls == 0) throw EstimateError("arm mean requested before any pull");
    return static_cast<double>(stats.reward_sum / static_cast<long double>(stats.pulls));
}

double arm_radius_from_log(std::uint64_t pulls, double range, double log_inv_dt) {
    if (pulls == 0) return kInfiniteRadius;
    return range * std::sqrt(log_inv_dt / (2.0 * static_cast<double>(pulls)));
}

double arm_radius(std::uint64_t pulls, double range, double dt) {
    require_probability(dt);
    return arm_radius_from_log(pulls, range, -std::log(dt));
}

double epsilon_sigma_from_log(std::uint64_t pairs, double coef, double log_inv_dt) {
    if (pairs == 0) return kInfiniteRadius;
    return coef * std::sqrt((std::log(6.0) + log_inv_dt) / (2.0 * static_cast<double>(pairs)));
}

double epsilon_sigma(std::uint64_t pairs, double coef, double dt) {
    require_probability(dt);
    return epsilon_sigma_from_log(pairs, coef, -std::log(dt));
}

double ThresholdStats::mean_hat() const {
    if (pairs == 0) throw EstimateError("threshold estimate requested before any pair");
    return static_cast<double>(s1 / static_cast<long double>(pairs));
}

double ThresholdStats::raw_variance() const {
    if (pairs == 0) throw EstimateError("threshold estimate requested before any pair");
    const long double m = static_cast<long double>(pairs);
    const long double second = s12 / m;
    const long double v = second - (s1 / m) * (s2 / m);
    // Differences within a few ulps of the second moment are rounding noise.
    if (std::abs(v) <= 16.0L * std::numeric_limits<long double>::epsilon() * std::abs(second)) return 0.0;
    return static_cast<double>(v);
}

double ThresholdStats::variance_hat() const { return std::abs(raw_variance()); }

double ThresholdStats::sigma_hat() const { return std::sqrt(variance_hat()); }

void ThresholdStats::refresh_upper(double coef, double log_inv_dt) {
    if (pairs == 0) return;
    const double candidate = variance_hat() + epsilon_sigma_from_log(pairs, coef, log_inv_dt);
    if (candidate < u_sigma) u_sigma = candidate;
}

ThresholdStats update_threshold(ThresholdStats stats, double x1, double x2, double coef,
                                double dt_next) {
    require_probability(dt_next);
    stats.add_pair(x1, x2);
    stats.refresh_upper(coef, -std::log(dt_next));
    return stats;
}

double threshold_estimate(const ThresholdStats& stats, double k) {
    return stats.mean_hat() + k * stats.sigma_hat();
}

double threshold_radius_from_log(const ThresholdStats& stats, double range, double coef, double k,
                                 double log_inv_dt) {
    if (stats.pairs == 0 || !std::isfinite(stats.u_sigma)) return kInfiniteRadius;
    const double scale =
        k == 0.0 ? range : range + std::numbers::sqrt2 * k * coef / std::sqrt(stats.u_sigma);
    return scale * std::sqrt(log_inv_dt / (2.0 * static_cast<double>(stats.pairs)));
}

double threshold_radius(const ThresholdStats& stats, double range, double coef, double k,
                        double dt) {
    require_probability(dt);
    return threshold_radius_from_log(stats, range, coef, k, -std::log(dt));
}

Interval confidence_bounds(double estimate, double radius) {
    if (!(radius >= 0.0)) throw std::invalid_argument("radius must be >= 0");
    return {estimate - radius, estimate + radius};
}

}  // namespace outlier_bandit
