#include "outlier_bandit/ade.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace outlier_bandit {

Verdict classify(Interval arm, Interval threshold) {
    if (arm.upper <= threshold.lower) return Verdict::normal;
    if (arm.lower >= threshold.upper) return Verdict::outlier;
    return Verdict::undecided;
}

namespace {

void check_common(const ProblemView& problem, const Environment& env, double delta,
                  std::uint64_t batch) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (batch == 0) throw std::invalid_argument("batch must be >= 1");
    if (problem.arms == 0) throw std::invalid_argument("problem has no arms");
    if (problem.arms != env.arms()) {
        throw std::invalid_argument("problem arm count does not match the environment");
    }
}

// Candidates sorted by empirical mean. All live candidates share the same
// radius, so normals can only leave from the low end and outliers from the
// high end; peeling both ends is equivalent to scanning every candidate.
class CandidateSet {
public:
    explicit CandidateSet(std::size_t arms) : order_(arms) {
        for (std::size_t i = 0; i < arms; ++i) order_[i] = i;
        hi_ = arms;
    }

    bool empty() const { return lo_ == hi_; }
    std::size_t size() const { return hi_ - lo_; }
    auto begin() const { return order_.begin() + static_cast<std::ptrdiff_t>(lo_); }
    auto end() const { return order_.begin() + static_cast<std::ptrdiff_t>(hi_); }

    void resort(const std::vector<double>& means) {
        std::sort(order_.begin() + static_cast<std::ptrdiff_t>(lo_),
                  order_.begin() + static_cast<std::ptrdiff_t>(hi_),
                  [&](std::size_t x, std::size_t y) {
                      return means[x] < means[y] || (means[x] == means[y] && x < y);
                  });
    }

    template <typename OnDecided>
    void peel(const std::vector<double>& means, double radius, Interval threshold,
              OnDecided&& on_decided) {
        while (lo_ < hi_) {
            const std::size_t arm = order_[lo_];
            const Verdict v = classify(confidence_bounds(means[arm], radius), threshold);
            if (v != Verdict::normal) break;
            on_decided(arm, v);
            ++lo_;
        }
        while (lo_ < hi_) {
            const std::size_t arm = order_[hi_ - 1];
            const Verdict v = classify(confidence_bounds(means[arm], radius), threshold);
            if (v != Verdict::outlier) break;
            on_decided(arm, v);
            --hi_;
        }
    }

private:
    std::vector<std::size_t> order_;
    std::size_t lo_ = 0;
    std::size_t hi_ = 0;
};

}  // namespace

RunResult run_ade(const ProblemView& problem, Environment& env, const AdeOptions& options,
                  const RoundObserver& observer) {
    check_common(problem, env, options.delta, options.batch);

    const std::size_t n = problem.arms;
    const double range = problem.bounds.range();
    const double coef = problem.bounds.variance_coef();
    const double k = problem.k;
    const std::uint64_t batch = options.batch;
    const double log_base = log_inv_delta_t(options.delta, n, 1);

    RunResult result;
    result.per_arm_pulls.assign(n, 0);
    result.elimination_round.assign(n, 0);

    std::vector<ArmStats> arm_stats(n);
    std::vector<double> means(n, 0.0);
    ThresholdStats th;
    std::uint64_t m_a = 0;
    std::uint64_t rounds = 0;
    std::uint64_t total = 0;

    // Initialization: one random pair, then one pull of every arm.
    {
        const PairDraw d = env.pull_pair_random();
        th.add_pair(d.first, d.second);
        total += 2;
        ++rounds;
        for (std::size_t i = 0; i < n; ++i) arm_stats[i].add(env.pull(i));
        total += n;
        ++m_a;
        ++rounds;
    }

    // Round index of the next decision is rounds + 1.
    auto log_dt_now = [&] { return log_base + 2.0 * std::log(static_cast<double>(rounds + 1)); };

    double log_dt = log_dt_now();
    th.refresh_upper(coef, log_dt);
    double r_theta = threshold_radius_from_log(th, range, coef, k, log_dt);
    double r_a = arm_radius_from_log(m_a, range, log_dt);
    for (std::size_t i = 0; i < n; ++i) means[i] = arm_mean(arm_stats[i]);

    CandidateSet candidates(n);
    candidates.resort(means);

    std::vector<std::size_t> outliers;
    std::vector<std::size_t> normals;

    while (!candidates.empty()) {
        if (total >= options.max_pulls) break;

        const bool sample_threshold = r_a <= r_theta;
        if (sample_threshold) {
            for (std::uint64_t b = 0; b < batch; ++b) {
                const PairDraw d = env.pull_pair_random();
                th.add_pair(d.first, d.second);
            }
            total += 2 * batch;
        } else {
            for (std::size_t arm : candidates) {
                ArmStats& s = arm_stats[arm];
                for (std::uint64_t b = 0; b < batch; ++b) s.add(env.pull(arm));
                means[arm] = arm_mean(s);
            }
            total += batch * candidates.size();
            m_a += batch;
            candidates.resort(means);
        }
        rounds += batch;

        log_dt = log_dt_now();
        th.refresh_upper(coef, log_dt);
        r_theta = threshold_radius_from_log(th, range, coef, k, log_dt);
        r_a = arm_radius_from_log(m_a, range, log_dt);
        const double theta_hat = threshold_estimate(th, k);

        if (std::isfinite(r_theta) && std::isfinite(r_a) && r_a > 0.0) {
            result.min_radius_ratio = std::min(result.min_radius_ratio, r_theta / r_a);
        }

        candidates.peel(means, r_a, confidence_bounds(theta_hat, r_theta),
                        [&](std::size_t arm, Verdict v) {
                            (v == Verdict::outlier ? outliers : normals).push_back(arm);
                            result.elimination_round[arm] = rounds;
                        });

        if (observer) {
            observer(RoundSnapshot{rounds, m_a, th.pairs, total, sample_threshold, r_a, r_theta,
                                   theta_hat, candidates.size(), outliers.size(), normals.size()});
        }
    }

    result.terminated = candidates.empty();
    result.undecided.assign(candidates.begin(), candidates.end());
    std::sort(result.undecided.begin(), result.undecided.end());
    std::sort(outliers.begin(), outliers.end());
    std::sort(normals.begin(), normals.end());
    result.outliers = std::move(outliers);
    result.normals = std::move(normals);
    result.total_pulls = total;
    result.theta_pairs = th.pairs;
    result.sequential_rounds = m_a;
    result.rounds = rounds;
    for (std::size_t i = 0; i < n; ++i) result.per_arm_pulls[i] = arm_stats[i].pulls;
    return result;
}

Diagnostics diagnose(const RunResult& result, const ProblemInstance& instance, double delta) {
    if (!result.terminated) throw std::invalid_argument("diagnostics need a terminated run");
    if (result.per_arm_pulls.size() != instance.arms()) {
        throw std::invalid_argument("run result does not match the instance");
    }
    const std::size_t n = instance.arms();
    const double theta = true_threshold(instance);
    const double sigma = sigma_of_means(instance.means);
    const double range = instance.bounds.range();
    const double coef = instance.bounds.variance_coef();
    const double k = instance.k;
    const double hardness = sigma > 0.0 ? std::max(1.0, (k / sigma) * (k / sigma)) : INFINITY;

    Diagnostics out;
    out.arms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ArmDiagnostic d;
        d.arm = i;
        d.gap = std::abs(instance.means[i] - theta);
        d.pulls = result.per_arm_pulls[i];
        d.pulls_gap_sq = static_cast<double>(d.pulls) * d.gap * d.gap;
        d.log_term = std::log(std::sqrt(static_cast<double>(n) / delta) * hardness / (d.gap * d.gap));
        out.arms.push_back(d);
    }

    const auto last = std::max_element(result.elimination_round.begin(), result.elimination_round.end());
    out.last_eliminated = static_cast<std::size_t>(last - result.elimination_round.begin());
    const auto last_pulls = result.per_arm_pulls[out.last_eliminated];
    out.pair_ratio = last_pulls > 0 ? static_cast<double>(result.theta_pairs) / static_cast<double>(last_pulls)
                                    : INFINITY;
    if (sigma > 0.0) {
        const double f = 1.0 + std::numbers::sqrt2 * coef * k / (range * sigma);
        out.pair_ratio_bound = 4.0 * f * f;
    } else {
        out.pair_ratio_bound = k == 0.0 ? 4.0 : INFINITY;
    }
    out.pair_ratio_ok = out.pair_ratio <= out.pair_ratio_bound;
    out.min_radius_ratio = result.min_radius_ratio;
    out.radius_interleave_ok = result.min_radius_ratio >= 0.5;
    return out;
}

}  // namespace outlier_bandit
