#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "outlier_bandit/bench.hpp"
#include "outlier_bandit/ingest.hpp"
#include "outlier_bandit/verify.hpp"

namespace ob = outlier_bandit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBudget = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t seed_or_env(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("BANDIT_OUTLIER_SEED"); env && *env) {
        try {
            std::size_t used = 0;
            const auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError(std::string("BANDIT_OUTLIER_SEED is not an unsigned integer: '") + env + "'");
    }
    return 0;
}

ob::DminRange parse_dmin(const std::string& text) {
    const auto sep = text.find_first_of(",:");
    if (sep == std::string::npos) throw UsageError("--dmin expects lo,hi");
    try {
        return {std::stod(text.substr(0, sep)), std::stod(text.substr(sep + 1))};
    } catch (const std::exception&) {
        throw UsageError("--dmin expects two reals, got '" + text + "'");
    }
}

nlohmann::json one_based(const std::vector<std::size_t>& arms) {
    auto j = nlohmann::json::array();
    for (auto a : arms) j.push_back(a + 1);
    return j;
}

std::string join_one_based(const std::vector<std::size_t>& arms) {
    std::string s;
    for (std::size_t i = 0; i < arms.size(); ++i) s += (i ? " " : "") + std::to_string(arms[i] + 1);
    return s.empty() ? "(none)" : s;
}

struct RunFlags {
    std::string algo;
    std::string means;
    bool synthetic = false;
    std::size_t n = 0;
    double k = 0.0;
    double delta = 0.1;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> batch;
    std::uint64_t weight = 2;
    std::uint64_t max_pulls = 1'000'000'000;
    double a = 0.0;
    double b = 1.0;
    std::string model = "bernoulli";
    std::string dmin;
    std::string out = "stdout";
    bool pretty = false;
};

int cmd_run(const RunFlags& f) {
    ob::ExperimentConfig c;
    try {
        c.algo = ob::parse_algorithm(f.algo);
        c.model = ob::parse_reward_model(f.model);
        c.bounds = ob::Bounds(f.a, f.b);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (f.means.empty() == !f.synthetic) throw UsageError("exactly one of --means or --synthetic is required");
    if (f.synthetic) {
        if (f.n == 0) throw UsageError("--synthetic needs --n >= 1");
        c.source = ob::MeansSource::synthetic;
        c.n = f.n;
        if (!f.dmin.empty()) c.dmin_range = parse_dmin(f.dmin);
    } else {
        c.source = ob::MeansSource::file;
        c.means_path = f.means;
    }
    c.k = f.k;
    c.delta = f.delta;
    c.seeds = 1;
    c.base_seed = seed_or_env(f.seed);
    c.batch = f.batch.value_or(c.algo == ob::Algorithm::ade ? 1 : 1000);
    c.weight = f.weight;
    c.max_pulls = f.max_pulls;
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }

    const ob::TrialOutcome outcome = ob::run_trial(c, 0);
    const ob::TrialRecord& rec = outcome.record;
    if (!rec.error.empty()) {
        std::cerr << "error: " << rec.error << '\n';
        return kExitUsage;
    }

    std::ofstream file;
    if (f.out != "stdout" && f.out != "-") {
        file.open(f.out);
        if (!file) {
            std::cerr << "error: cannot write " << f.out << '\n';
            return kExitUsage;
        }
    }
    std::ostream& os = file.is_open() ? static_cast<std::ostream&>(file) : std::cout;

    if (f.pretty) {
        os << ob::to_string(rec.algo) << " on " << rec.n << " arms, k=" << ob::format_real(rec.k)
           << ", delta=" << ob::format_real(rec.delta) << '\n'
           << "  terminated:  " << (rec.terminated ? "yes" : "no (budget exhausted)") << '\n'
           << "  total pulls: " << rec.total_pulls << '\n'
           << "  outliers:    " << join_one_based(outcome.result.outliers) << '\n'
           << "  correct:     " << (rec.correct ? "yes" : "no") << '\n';
    } else {
        os << ob::record_line(rec) << '\n';
        nlohmann::ordered_json arms;
        arms["outliers"] = one_based(outcome.result.outliers);
        arms["normals"] = one_based(outcome.result.normals);
        if (!rec.terminated) arms["undecided"] = one_based(outcome.result.undecided);
        os << arms.dump() << '\n';
    }
    if (!os) {
        std::cerr << "error: write failed\n";
        return kExitUsage;
    }
    return rec.terminated ? kExitOk : kExitBudget;
}

int cmd_bench(const std::string& config_path, const std::string& out_dir, std::optional<unsigned> jobs,
              bool no_timing) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("cannot open config " + config_path);
    ob::BenchPlan plan;
    try {
        plan = ob::parse_bench_config(in);
    } catch (const ob::ConfigError& e) {
        throw UsageError(e.what());
    }
    const unsigned workers = jobs.value_or(plan.jobs);

    std::vector<ob::TrialRecord> records;
    for (const auto& config : plan.configs) {
        auto part = ob::run_experiment(config, workers);
        records.insert(records.end(), part.begin(), part.end());
    }
    const auto rows = ob::aggregate(records);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UsageError("cannot create " + out_dir + ": " + ec.message());
    const auto dir = std::filesystem::path(out_dir);
    std::ofstream rec_out(dir / "records.jsonl");
    std::ofstream sum_out(dir / "summary.csv");
    if (!rec_out || !sum_out) throw UsageError("cannot write into " + out_dir);
    ob::write_records(rec_out, records, !no_timing);
    const std::string summary = ob::summary_csv(rows);
    sum_out << summary;
    if (!rec_out || !sum_out) throw UsageError("write failed in " + out_dir);
    std::cout << summary;
    return kExitOk;
}

struct GenFlags {
    std::size_t n = 0;
    std::optional<double> k;
    std::string dmin;
    std::optional<std::uint64_t> seed;
    double a = 0.0;
    double b = 1.0;
    bool standin_crowd = false;
    std::string out = "stdout";
};

int cmd_gen(const GenFlags& f) {
    const std::uint64_t seed = seed_or_env(f.seed);
    std::vector<double> means;
    if (f.standin_crowd) {
        means = ob::crowd_error_rates_standin(seed, f.n ? f.n : ob::kCrowdWorkerCount);
    } else {
        if (f.n == 0) throw UsageError("gen needs --n >= 1 or --standin-crowd");
        std::optional<ob::DminRange> range;
        if (!f.dmin.empty()) {
            if (!f.k) throw UsageError("--dmin needs --k");
            range = parse_dmin(f.dmin);
        }
        ob::Bounds bounds;
        try {
            bounds = ob::Bounds(f.a, f.b);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        ob::Rng rng(ob::derive_seed(seed, 0));
        try {
            means = ob::gen_synthetic(f.n, f.k.value_or(0.0), range, rng, bounds);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    if (f.out == "stdout" || f.out == "-") {
        ob::write_means_csv(std::cout, means);
    } else {
        try {
            ob::write_means_csv(std::filesystem::path(f.out), means);
        } catch (const ob::DatasetError& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    return kExitOk;
}

int cmd_verify(bool full, std::uint64_t seed, double theta_radius_scale) {
    const std::uint64_t reps = full ? ob::kFullReps : ob::kQuickReps;
    const auto results = ob::run_verify_grid(reps, seed, theta_radius_scale);
    std::size_t checks = 0;
    std::size_t failures = 0;
    for (const auto& g : results) {
        for (const auto& r : g.results) {
            ++checks;
            std::ostringstream line;
            line << (r.passed() ? "PASS " : "FAIL ") << ob::to_string(r.bound_id) << ' ' << g.grid_case.label
                 << " m=" << g.grid_case.m << " dt=" << ob::format_real(g.grid_case.dt)
                 << " rate=" << ob::format_real(r.rate) << " bound=" << ob::format_real(r.bound);
            std::cout << line.str() << '\n';
            if (!r.passed()) {
                ++failures;
                std::cerr << line.str() << '\n';
            }
        }
    }
    std::cout << "verify: " << checks << " checks, " << failures << " failed, reps=" << reps << '\n';
    return failures == 0 ? kExitOk : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outlier arm identification with bandit feedback"};
    app.require_subcommand(1);

    RunFlags rf;
    auto* run = app.add_subcommand("run", "Run one algorithm on one instance");
    run->add_option("--algo", rf.algo, "ade, rr or wrr")->required();
    auto* means_opt = run->add_option("--means", rf.means, "CSV file of arm means");
    auto* synth_opt = run->add_flag("--synthetic", rf.synthetic, "Draw uniform means (see --n, --dmin)");
    means_opt->excludes(synth_opt);
    run->add_option("--n", rf.n, "Arm count for --synthetic");
    run->add_option("--k", rf.k, "Threshold multiplier")->required();
    run->add_option("--delta", rf.delta, "Failure probability")->capture_default_str();
    run->add_option("--seed", rf.seed, "Base seed (fallback: BANDIT_OUTLIER_SEED, then 0)");
    run->add_option("--batch", rf.batch, "Pulls per sampling step (default 1 for ade, 1000 otherwise)");
    run->add_option("--weight", rf.weight, "WRR weight")->capture_default_str();
    run->add_option("--max-pulls", rf.max_pulls, "Pull budget")->capture_default_str();
    run->add_option("--a", rf.a, "Reward lower bound")->capture_default_str();
    run->add_option("--b", rf.b, "Reward upper bound")->capture_default_str();
    run->add_option("--model", rf.model, "bernoulli or point-mass")->capture_default_str();
    run->add_option("--dmin", rf.dmin, "Minimum gap range lo,hi for --synthetic");
    run->add_option("--out", rf.out, "Output path or stdout")->capture_default_str();
    run->add_flag("--pretty", rf.pretty, "Human-readable output");

    std::string config_path;
    std::string out_dir;
    std::optional<unsigned> jobs;
    bool no_timing = false;
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep from a config file");
    bench->add_option("--config", config_path, "key = value config file")->required();
    bench->add_option("--out-dir", out_dir, "Directory for records.jsonl and summary.csv")->required();
    bench->add_option("--jobs", jobs, "Worker threads (overrides the config)");
    bench->add_flag("--no-timing", no_timing, "Write wall_ms as 0");

    GenFlags gf;
    auto* gen = app.add_subcommand("gen", "Write a means CSV");
    gen->add_option("--n", gf.n, "Arm count");
    gen->add_option("--k", gf.k, "Threshold multiplier (needed with --dmin)");
    gen->add_option("--dmin", gf.dmin, "Minimum gap range lo,hi");
    gen->add_option("--seed", gf.seed, "Seed (fallback: BANDIT_OUTLIER_SEED, then 0)");
    gen->add_option("--a", gf.a, "Lower bound")->capture_default_str();
    gen->add_option("--b", gf.b, "Upper bound")->capture_default_str();
    gen->add_flag("--standin-crowd", gf.standin_crowd, "Synthetic worker error rates (722 rows unless --n)");
    gen->add_option("--out", gf.out, "Output path or stdout")->capture_default_str();

    bool quick = false;
    bool full = false;
    std::uint64_t verify_seed = 0;
    double theta_scale = 1.0;
    auto* verify = app.add_subcommand("verify", "Monte-Carlo coverage checks over the pinned grid");
    auto* quick_opt = verify->add_flag("--quick", quick, "10^4 replications per case (default)");
    verify->add_flag("--full", full, "10^5 replications per case")->excludes(quick_opt);
    verify->add_option("--seed", verify_seed, "Seed")->capture_default_str();
    verify->add_option("--theta-radius-scale", theta_scale)->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(rf);
        if (bench->parsed()) return cmd_bench(config_path, out_dir, jobs, no_timing);
        if (gen->parsed()) return cmd_gen(gf);
        if (verify->parsed()) return cmd_verify(full, verify_seed, theta_scale);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
