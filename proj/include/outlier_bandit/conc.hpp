#pragma once

// Estimators and confidence radii shared by the algorithms.
//
// Radii use natural logarithms. Functions taking a sample count return
// +infinity when the count is zero; the algorithms rely on that sentinel
// before their first samples arrive.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace outlier_bandit {

inline constexpr double kInfiniteRadius = std::numeric_limits<double>::infinity();

/// Raised when an estimate is requested before any sample exists.
class EstimateError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Per-round failure budget 3*delta / ((n + 4) * pi^2 * t^2). Requires t >= 1.
double delta_t(double delta, std::size_t arms, std::uint64_t t);

/// ln(1/delta_t) without forming delta_t, which underflows for huge t.
double log_inv_delta_t(double delta, std::size_t arms, std::uint64_t t);

struct ArmStats {
    std::uint64_t pulls = 0;
    long double reward_sum = 0.0L;

    void add(double reward) {
        ++pulls;
        reward_sum += reward;
    }

    friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

/// Empirical mean. Throws EstimateError when pulls == 0.
double arm_mean(const ArmStats& stats);

/// range * sqrt(ln(1/dt) / (2 * pulls)); +inf when pulls == 0.
double arm_radius(std::uint64_t pulls, double range, double dt);
double arm_radius_from_log(std::uint64_t pulls, double range, double log_inv_dt);

/// coef * sqrt(ln(6/dt) / (2 * pairs)); +inf when pairs == 0.
double epsilon_sigma(std::uint64_t pairs, double coef, double dt);
double epsilon_sigma_from_log(std::uint64_t pairs, double coef, double log_inv_dt);

/// Running sums over random paired samples (x1, x2) and the running minimum
/// of sigma_hat^2 + epsilon_sigma used to scale the threshold radius.
struct ThresholdStats {
    std::uint64_t pairs = 0;
    long double s1 = 0.0L;
    long double s2 = 0.0L;
    long double s12 = 0.0L;
    double u_sigma = kInfiniteRadius;

    /// Accumulate a pair without touching u_sigma.
    void add_pair(double x1, double x2) {
        ++pairs;
        s1 += x1;
        s2 += x2;
        s12 += static_cast<long double>(x1) * x2;
    }

    /// u_sigma <- min(u_sigma, sigma_hat^2 + epsilon_sigma(pairs, coef, dt)).
    void refresh_upper(double coef, double log_inv_dt);

    /// s1 / m
    double mean_hat() const;
    /// V = s12/m - (s1/m)(s2/m); may be negative.
    double raw_variance() const;
    /// |V|
    double variance_hat() const;
    /// sqrt(|V|)
    double sigma_hat() const;

    friend bool operator==(const ThresholdStats&, const ThresholdStats&) = default;
};

/// Adds one pair and refreshes u_sigma at the new pair count.
ThresholdStats update_threshold(ThresholdStats stats, double x1, double x2, double coef,
                                double dt_next);

/// mean_hat + k * sigma_hat. Throws EstimateError when pairs == 0.
double threshold_estimate(const ThresholdStats& stats, double k);

/// (range + sqrt(2) k coef / sqrt(u_sigma)) * sqrt(ln(1/dt) / (2 m)).
/// +inf when no pairs were seen or u_sigma is still +inf.
double threshold_radius(const ThresholdStats& stats, double range, double coef, double k,
                        double dt);
double threshold_radius_from_log(const ThresholdStats& stats, double range, double coef, double k,
                                 double log_inv_dt);

struct Interval {
    double lower;
    double upper;

    friend bool operator==(const Interval&, const Interval&) = default;
};

/// (estimate - radius, estimate + radius). Requires radius >= 0.
Interval confidence_bounds(double estimate, double radius);

}  // namespace outlier_bandit
