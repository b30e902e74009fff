#pragma once

// Experiment harness: synthetic instances with a controlled minimum gap,
// seeded trials, aggregation and the record / summary text formats.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "outlier_bandit/ade.hpp"
#include "outlier_bandit/env.hpp"
#include "outlier_bandit/rng.hpp"

namespace outlier_bandit {

enum class Algorithm { ade, rr, wrr };

std::string_view to_string(Algorithm algo);
Algorithm parse_algorithm(std::string_view text);

struct DminRange {
    double lo = 0.0;
    double hi = 1.0;

    friend bool operator==(const DminRange&, const DminRange&) = default;
};

enum class MeansSource { synthetic, file };

struct ExperimentConfig {
    Algorithm algo = Algorithm::ade;
    std::size_t n = 0;  ///< synthetic only; file instances use their row count
    double k = 0.0;
    double delta = 0.1;
    std::optional<DminRange> dmin_range;
    MeansSource source = MeansSource::synthetic;
    std::string means_path;
    Bounds bounds;
    RewardModel model = RewardModel::bernoulli_scaled;
    std::uint64_t seeds = 10;
    std::uint64_t base_seed = 0;
    std::uint64_t batch = 1;
    std::uint64_t weight = 2;
    std::uint64_t max_pulls = 1'000'000'000;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// 16 hex digits identifying every field that affects the outcome.
std::string config_digest(const ExperimentConfig& config);

struct TrialRecord {
    std::string config_digest;
    Algorithm algo = Algorithm::ade;
    std::size_t n = 0;
    double k = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t total_pulls = 0;
    std::uint64_t theta_pairs = 0;
    std::uint64_t rounds = 0;
    bool correct = false;
    bool terminated = false;
    double wall_ms = 0.0;
    double dmin_realized = 0.0;
    std::string error;  ///< empty unless the trial threw

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

class GenerationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMaxGenerationAttempts = 100'000;

/// I.i.d. uniform means on [a, b] (default [0, 1]). With a range, redraws
/// until lo <= min_i |y_i - theta| <= hi, up to kMaxGenerationAttempts times.
std::vector<double> gen_synthetic(std::size_t n, double k, std::optional<DminRange> range, Rng& rng,
                                  const Bounds& bounds = Bounds{});

/// Per-trial seed; independent of the algorithm so that ADE, RR and WRR
/// see the same instance and reward stream for the same trial.
std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index);

struct TrialOutcome {
    TrialRecord record;
    ProblemInstance instance;
    RunResult result;
};

/// One trial. Failures land in record.error instead of propagating.
TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index);

/// All trials of a config, sorted by seed. Up to `jobs` worker threads.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, unsigned jobs = 1);

struct SummaryRow {
    std::string config_digest;
    Algorithm algo = Algorithm::ade;
    std::size_t n = 0;
    double k = 0.0;
    double delta = 0.0;
    std::size_t trials = 0;
    double mean_total_pulls = 0.0;
    double std_total_pulls = 0.0;  ///< sample deviation, 0 for a single trial
    double correct_rate = 0.0;
    double terminated_rate = 0.0;
};

/// Grouped by config digest in order of first appearance.
std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records);

/// One JSON object per line, fixed field order.
std::string record_line(const TrialRecord& record, bool with_wall_time = true);
void write_records(std::ostream& out, std::span<const TrialRecord> records, bool with_wall_time = true);

std::string summary_csv(std::span<const SummaryRow> rows);

/// Shortest decimal that round-trips.
std::string format_real(double value);

// Bench configuration files: `key = value` lines, `#` comments. List-valued
// keys (algos, n, k, dmin) expand into the cross product of configs.

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& what)
        : std::runtime_error("config key '" + key + "': " + what), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct BenchPlan {
    std::vector<ExperimentConfig> configs;
    unsigned jobs = 1;
};

BenchPlan parse_bench_config(std::istream& in);

}  // namespace outlier_bandit
