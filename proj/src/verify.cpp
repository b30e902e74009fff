#include "outlier_bandit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "outlier_bandit/conc.hpp"

namespace outlier_bandit {

std::string_view to_string(Bound bound_id) {
    switch (bound_id) {
        case Bound::l1: return "L1";
        case Bound::l2: return "L2";
        case Bound::l3: return "L3";
        case Bound::l4: return "L4";
        case Bound::l5: return "L5";
    }
    return "L?";
}

double nominal_rate(Bound bound_id, double dt) {
    switch (bound_id) {
        case Bound::l1: return 2.0 * dt;
        case Bound::l2: return dt;
        case Bound::l3: return dt;
        case Bound::l4: return 8.0 * dt;
        case Bound::l5: return 2.0 * dt;
    }
    return 0.0;
}

namespace {

CoverageResult finish(Bound bound_id, std::uint64_t trials, std::uint64_t violations, double dt) {
    CoverageResult r;
    r.bound_id = bound_id;
    r.trials = trials;
    r.violations = violations;
    r.rate = static_cast<double>(violations) / static_cast<double>(trials);
    r.nominal = std::min(1.0, nominal_rate(bound_id, dt));
    r.bound = r.nominal + 3.0 * std::sqrt(r.nominal * (1.0 - r.nominal) / static_cast<double>(trials));
    return r;
}

}  // namespace

std::array<CoverageResult, 5> coverage_all(const ProblemInstance& instance, std::uint64_t m, double dt,
                                           std::uint64_t reps, const CoverageOptions& options) {
    if (m == 0) throw std::invalid_argument("m must be >= 1");
    if (reps == 0) throw std::invalid_argument("reps must be >= 1");
    if (!(dt > 0.0 && dt < 1.0)) throw std::invalid_argument("dt must lie in (0, 1)");

    Environment env(instance, options.model, options.seed);
    const double range = instance.bounds.range();
    const double coef = instance.bounds.variance_coef();
    const double k = instance.k;
    const double log_inv_dt = -std::log(dt);
    const double mu = mean_of_means(instance.means);
    const double sigma = sigma_of_means(instance.means);
    const double theta = mu + k * sigma;
    const double r_mu = arm_radius_from_log(m, range, log_inv_dt);
    const double eps = epsilon_sigma_from_log(m, coef, log_inv_dt);
    const std::size_t n = instance.arms();

    std::array<std::uint64_t, 5> bad{};
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        ThresholdStats stats;
        for (std::uint64_t p = 0; p < m; ++p) {
            const PairDraw d = env.pull_pair_random();
            stats.add_pair(d.first, d.second);
            stats.refresh_upper(coef, log_inv_dt);
        }
        const double mu_hat = stats.mean_hat();
        const double var_hat = stats.variance_hat();
        const double sigma_hat = stats.sigma_hat();
        if (!(std::abs(mu_hat - mu) <= r_mu)) ++bad[0];
        if (!(std::abs(var_hat - sigma * sigma) <= eps)) ++bad[1];
        if (!(std::abs(sigma_hat - sigma) <= std::sqrt(2.0 / stats.u_sigma) * eps)) ++bad[2];
        const double r_theta =
            options.theta_radius_scale * threshold_radius_from_log(stats, range, coef, k, log_inv_dt);
        if (!(std::abs(mu_hat + k * sigma_hat - theta) <= r_theta)) ++bad[3];

        for (std::size_t arm = 0; arm < n; ++arm) {
            ArmStats a;
            for (std::uint64_t p = 0; p < m; ++p) a.add(env.pull(arm));
            if (!(std::abs(arm_mean(a) - instance.means[arm]) <= r_mu)) ++bad[4];
        }
    }

    return {finish(Bound::l1, reps, bad[0], dt), finish(Bound::l2, reps, bad[1], dt),
            finish(Bound::l3, reps, bad[2], dt), finish(Bound::l4, reps, bad[3], dt),
            finish(Bound::l5, reps * n, bad[4], dt)};
}

CoverageResult coverage_test(const ProblemInstance& instance, std::uint64_t m, double dt, std::uint64_t reps,
                             Bound bound_id, const CoverageOptions& options) {
    return coverage_all(instance, m, dt, reps, options)[static_cast<std::size_t>(bound_id)];
}

bool MomentCheck::within(double sigmas) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(truth));
    return std::abs(mean - truth) <= sigmas * se + slack;
}

UnbiasednessResult unbiasedness_test(const ProblemInstance& instance, std::uint64_t m, std::uint64_t reps,
                                     RewardModel model, std::uint64_t seed) {
    if (m == 0) throw std::invalid_argument("m must be >= 1");
    if (reps < 2) throw std::invalid_argument("reps must be >= 2");

    Environment env(instance, model, seed);
    long double sum_mu = 0.0L, sq_mu = 0.0L, sum_s = 0.0L, sq_s = 0.0L;
    for (std::uint64_t rep = 0; rep < reps; ++rep) {
        ThresholdStats stats;
        for (std::uint64_t p = 0; p < m; ++p) {
            const PairDraw d = env.pull_pair_random();
            stats.add_pair(d.first, d.second);
        }
        const long double mu_hat = stats.s1 / static_cast<long double>(m);
        const long double s_hat = stats.s12 / static_cast<long double>(m);
        sum_mu += mu_hat;
        sq_mu += mu_hat * mu_hat;
        sum_s += s_hat;
        sq_s += s_hat * s_hat;
    }

    auto summarize = [reps](long double sum, long double sq, double truth) {
        const long double r = static_cast<long double>(reps);
        const long double mean = sum / r;
        const long double var = std::max(0.0L, (sq - r * mean * mean) / (r - 1.0L));
        return MomentCheck{static_cast<double>(mean), static_cast<double>(std::sqrt(var / r)), truth};
    };

    long double second = 0.0L;
    for (double y : instance.means) second += static_cast<long double>(y) * y;
    second /= static_cast<long double>(instance.arms());

    return {summarize(sum_mu, sq_mu, mean_of_means(instance.means)),
            summarize(sum_s, sq_s, static_cast<double>(second))};
}

Classification brute_force_classify(const ProblemInstance& instance) {
    Classification c;
    c.outliers = true_outliers(instance);
    std::size_t next = 0;
    for (std::size_t i = 0; i < instance.arms(); ++i) {
        if (next < c.outliers.size() && c.outliers[next] == i) {
            ++next;
        } else {
            c.normals.push_back(i);
        }
    }
    return c;
}

std::vector<GridCase> verify_grid() {
    struct Base {
        const char* label;
        std::vector<double> means;
        RewardModel model;
    };
    const std::vector<Base> bases{
        {"two-arm", {0.2, 0.8}, RewardModel::bernoulli_scaled},
        {"five-arm", {0.1, 0.3, 0.5, 0.7, 0.9}, RewardModel::bernoulli_scaled},
        {"four-arm point-mass", {0.2, 0.4, 0.6, 0.8}, RewardModel::point_mass},
    };
    std::vector<GridCase> grid;
    for (const Base& b : bases) {
        for (std::uint64_t m : {50, 200}) {
            for (double dt : {0.01, 0.05}) {
                grid.push_back({b.label, make_instance(b.means, Bounds{}, 2.0), b.model, m, dt});
            }
        }
    }
    return grid;
}

std::vector<GridResult> run_verify_grid(std::uint64_t reps, std::uint64_t seed, double theta_radius_scale) {
    std::vector<GridResult> out;
    const auto grid = verify_grid();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const GridCase& g = grid[i];
        CoverageOptions opts{g.model, derive_seed(seed, i), theta_radius_scale};
        out.push_back({g, coverage_all(g.instance, g.m, g.dt, reps, opts)});
    }
    return out;
}

}  // namespace outlier_bandit
