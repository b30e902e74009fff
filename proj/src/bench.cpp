#include "outlier_bandit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "outlier_bandit/baselines.hpp"
#include "outlier_bandit/ingest.hpp"

namespace outlier_bandit {

std::string_view to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::ade: return "ADE";
        case Algorithm::rr: return "RR";
        case Algorithm::wrr: return "WRR";
    }
    return "unknown";
}

Algorithm parse_algorithm(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "ade") return Algorithm::ade;
    if (lower == "rr") return Algorithm::rr;
    if (lower == "wrr") return Algorithm::wrr;
    throw std::invalid_argument("unknown algorithm '" + std::string(text) + "'");
}

void ExperimentConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
    if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("k must be finite and >= 0");
    if (dmin_range) {
        if (!(dmin_range->lo > 0.0) || !(dmin_range->lo <= dmin_range->hi) || !(dmin_range->hi < 1.0)) {
            throw std::invalid_argument("dmin range must satisfy 0 < lo <= hi < 1");
        }
    }
    if (source == MeansSource::synthetic && n == 0) throw std::invalid_argument("n must be >= 1");
    if (source == MeansSource::file && means_path.empty()) {
        throw std::invalid_argument("means file path is empty");
    }
    if (batch == 0) throw std::invalid_argument("batch must be >= 1");
    if (weight == 0) throw std::invalid_argument("weight must be >= 1");
    if (max_pulls == 0) throw std::invalid_argument("max_pulls must be >= 1");
}

std::string format_real(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string config_digest(const ExperimentConfig& config) {
    std::ostringstream canon;
    canon << "algo=" << to_string(config.algo) << ";k=" << format_real(config.k)
          << ";delta=" << format_real(config.delta) << ";model=" << to_string(config.model)
          << ";a=" << format_real(config.bounds.a()) << ";b=" << format_real(config.bounds.b())
          << ";seeds=" << config.seeds << ";base_seed=" << config.base_seed << ";batch=" << config.batch
          << ";max_pulls=" << config.max_pulls;
    if (config.algo == Algorithm::wrr) canon << ";weight=" << config.weight;
    if (config.source == MeansSource::synthetic) {
        canon << ";source=synthetic;n=" << config.n;
        if (config.dmin_range) {
            canon << ";dmin=" << format_real(config.dmin_range->lo) << ':'
                  << format_real(config.dmin_range->hi);
        }
    } else {
        canon << ";source=file;path=" << config.means_path;
    }

    // FNV-1a, 64 bit.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon.str()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

std::vector<double> gen_synthetic(std::size_t n, double k, std::optional<DminRange> range, Rng& rng,
                                  const Bounds& bounds) {
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (range && !(range->lo > 0.0 && range->lo <= range->hi && range->hi < 1.0)) {
        throw std::invalid_argument("dmin range must satisfy 0 < lo <= hi < 1");
    }
    std::vector<double> means(n);
    for (std::size_t attempt = 0; attempt < kMaxGenerationAttempts; ++attempt) {
        for (double& y : means) y = bounds.a() + bounds.range() * rng.uniform01();
        if (!range) return means;
        const double gap = min_gap(means, k);
        if (range->lo <= gap && gap <= range->hi) return means;
    }
    std::ostringstream msg;
    msg << "no instance with n=" << n << ", k=" << format_real(k) << " and min gap in ["
        << format_real(range->lo) << ", " << format_real(range->hi) << "] after "
        << kMaxGenerationAttempts << " attempts";
    throw GenerationError(msg.str());
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t trial_index) {
    return derive_seed(base_seed, trial_index);
}

TrialOutcome run_trial(const ExperimentConfig& config, std::uint64_t trial_index) {
    TrialOutcome out;
    TrialRecord& rec = out.record;
    rec.config_digest = config_digest(config);
    rec.algo = config.algo;
    rec.n = config.n;
    rec.k = config.k;
    rec.delta = config.delta;
    rec.seed = trial_seed(config.base_seed, trial_index);

    try {
        config.validate();
        std::vector<double> means;
        if (config.source == MeansSource::synthetic) {
            Rng gen(derive_seed(rec.seed, 0));
            means = gen_synthetic(config.n, config.k, config.dmin_range, gen, config.bounds);
        } else {
            means = load_means_csv(config.means_path, config.bounds).means;
        }
        out.instance = make_instance(std::move(means), config.bounds, config.k);
        rec.n = out.instance.arms();
        rec.dmin_realized = min_gap(out.instance);

        Environment env(out.instance, config.model, derive_seed(rec.seed, 1));
        const ProblemView view = ProblemView::of(out.instance);

        const auto start = std::chrono::steady_clock::now();
        switch (config.algo) {
            case Algorithm::ade:
                out.result = run_ade(view, env, AdeOptions{config.delta, config.batch, config.max_pulls});
                break;
            case Algorithm::rr:
                out.result = run_rr(view, env,
                                    BaselineOptions{config.delta, config.batch, config.weight, config.max_pulls});
                break;
            case Algorithm::wrr:
                out.result = run_wrr(view, env,
                                     BaselineOptions{config.delta, config.batch, config.weight, config.max_pulls});
                break;
        }
        const auto stop = std::chrono::steady_clock::now();
        rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();

        rec.total_pulls = out.result.total_pulls;
        rec.theta_pairs = out.result.theta_pairs;
        rec.rounds = out.result.rounds;
        rec.terminated = out.result.terminated;
        rec.correct = out.result.terminated && out.result.outliers == true_outliers(out.instance);
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.correct = false;
        rec.terminated = false;
    }
    return out;
}

std::vector<TrialRecord> run_experiment(const ExperimentConfig& config, unsigned jobs) {
    const std::size_t trials = static_cast<std::size_t>(config.seeds);
    std::vector<TrialRecord> records(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < trials; i = next++) records[i] = run_trial(config, i).record;
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(trials)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const TrialRecord& x, const TrialRecord& y) { return x.seed < y.seed; });
    return records;
}

std::vector<SummaryRow> aggregate(std::span<const TrialRecord> records) {
    std::vector<SummaryRow> rows;
    std::map<std::string, std::size_t> index;
    std::vector<std::vector<const TrialRecord*>> groups;
    for (const TrialRecord& r : records) {
        auto [it, inserted] = index.try_emplace(r.config_digest, rows.size());
        if (inserted) {
            SummaryRow row;
            row.config_digest = r.config_digest;
            row.algo = r.algo;
            row.n = r.n;
            row.k = r.k;
            row.delta = r.delta;
            rows.push_back(row);
            groups.emplace_back();
        }
        groups[it->second].push_back(&r);
    }

    for (std::size_t g = 0; g < rows.size(); ++g) {
        const auto& members = groups[g];
        SummaryRow& row = rows[g];
        row.trials = members.size();
        double sum = 0.0;
        std::size_t correct = 0;
        std::size_t terminated = 0;
        for (const TrialRecord* r : members) {
            sum += static_cast<double>(r->total_pulls);
            correct += r->correct ? 1 : 0;
            terminated += r->terminated ? 1 : 0;
        }
        const double count = static_cast<double>(members.size());
        row.mean_total_pulls = sum / count;
        double ss = 0.0;
        for (const TrialRecord* r : members) {
            const double d = static_cast<double>(r->total_pulls) - row.mean_total_pulls;
            ss += d * d;
        }
        row.std_total_pulls = members.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
        row.correct_rate = static_cast<double>(correct) / count;
        row.terminated_rate = static_cast<double>(terminated) / count;
    }
    return rows;
}

std::string record_line(const TrialRecord& record, bool with_wall_time) {
    nlohmann::ordered_json j;
    j["config_digest"] = record.config_digest;
    j["algo"] = std::string(to_string(record.algo));
    j["n"] = record.n;
    j["k"] = record.k;
    j["delta"] = record.delta;
    j["seed"] = record.seed;
    j["total_pulls"] = record.total_pulls;
    j["theta_pairs"] = record.theta_pairs;
    j["rounds"] = record.rounds;
    j["correct"] = record.correct;
    j["terminated"] = record.terminated;
    j["wall_ms"] = with_wall_time ? std::round(record.wall_ms * 1000.0) / 1000.0 : 0.0;
    j["dmin_realized"] = record.dmin_realized;
    if (!record.error.empty()) j["error"] = record.error;
    return j.dump();
}

void write_records(std::ostream& out, std::span<const TrialRecord> records, bool with_wall_time) {
    for (const TrialRecord& r : records) out << record_line(r, with_wall_time) << '\n';
}

std::string summary_csv(std::span<const SummaryRow> rows) {
    std::ostringstream out;
    out << "config_digest,algo,n,k,delta,trials,mean_total_pulls,std_total_pulls,correct_rate,terminated_rate\n";
    for (const SummaryRow& r : rows) {
        out << r.config_digest << ',' << to_string(r.algo) << ',' << r.n << ',' << format_real(r.k) << ','
            << format_real(r.delta) << ',' << r.trials << ',' << format_real(r.mean_total_pulls) << ','
            << format_real(r.std_total_pulls) << ',' << format_real(r.correct_rate) << ','
            << format_real(r.terminated_rate) << '\n';
    }
    return out.str();
}

}  // namespace outlier_bandit
