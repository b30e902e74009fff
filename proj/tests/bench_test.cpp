#include <gtest/gtest.h>

#include <sstream>
#include <string>
#include <vector>

#include "outlier_bandit/bench.hpp"

using namespace outlier_bandit;

namespace {

TrialRecord sample_record(std::uint64_t pulls) {
    TrialRecord r;
    r.config_digest = "00000000000000aa";
    r.algo = Algorithm::wrr;
    r.n = 20;
    r.k = 2.0;
    r.delta = 0.1;
    r.seed = 42;
    r.total_pulls = pulls;
    r.theta_pairs = 0;
    r.rounds = 7;
    r.correct = true;
    r.terminated = true;
    r.wall_ms = 1.23456789;
    r.dmin_realized = 0.15625;
    return r;
}

ExperimentConfig c1_config() {
    ExperimentConfig c;
    c.algo = Algorithm::ade;
    c.n = 20;
    c.k = 2.0;
    c.dmin_range = DminRange{0.15, 0.25};
    return c;
}

}  // namespace

TEST(Algorithm, ParseRoundTrip) {
    for (auto a : {Algorithm::ade, Algorithm::rr, Algorithm::wrr}) EXPECT_EQ(parse_algorithm(to_string(a)), a);
    EXPECT_EQ(parse_algorithm("wrr"), Algorithm::wrr);
    EXPECT_THROW(parse_algorithm("lucb"), std::invalid_argument);
}

TEST(RecordLine, Golden) {
    EXPECT_EQ(record_line(sample_record(1000)),
              R"({"config_digest":"00000000000000aa","algo":"WRR","n":20,"k":2.0,"delta":0.1,"seed":42,)"
              R"("total_pulls":1000,"theta_pairs":0,"rounds":7,"correct":true,"terminated":true,)"
              R"("wall_ms":1.235,"dmin_realized":0.15625})");
    EXPECT_EQ(record_line(sample_record(1000), false),
              R"({"config_digest":"00000000000000aa","algo":"WRR","n":20,"k":2.0,"delta":0.1,"seed":42,)"
              R"("total_pulls":1000,"theta_pairs":0,"rounds":7,"correct":true,"terminated":true,)"
              R"("wall_ms":0.0,"dmin_realized":0.15625})");
}

TEST(RecordLine, ErrorFieldLast) {
    TrialRecord r = sample_record(0);
    r.correct = false;
    r.terminated = false;
    r.error = "boom";
    const std::string line = record_line(r, false);
    EXPECT_TRUE(line.ends_with(R"("dmin_realized":0.15625,"error":"boom"})")) << line;
}

TEST(Summary, GoldenCsv) {
    std::vector<TrialRecord> recs{sample_record(10), sample_record(20), sample_record(30)};
    recs[2].correct = false;
    TrialRecord other = sample_record(5);
    other.config_digest = "00000000000000bb";
    other.algo = Algorithm::ade;
    other.terminated = false;
    other.correct = false;
    recs.insert(recs.begin() + 1, other);

    const auto rows = aggregate(recs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(summary_csv(rows),
              "config_digest,algo,n,k,delta,trials,mean_total_pulls,std_total_pulls,correct_rate,terminated_rate\n"
              "00000000000000aa,WRR,20,2,0.1,3,20,10,0.6666666666666666,1\n"
              "00000000000000bb,ADE,20,2,0.1,1,5,0,0,0\n");
}

TEST(Summary, EmptyInput) {
    EXPECT_TRUE(aggregate({}).empty());
    EXPECT_EQ(summary_csv({}),
              "config_digest,algo,n,k,delta,trials,mean_total_pulls,std_total_pulls,correct_rate,terminated_rate\n");
}

TEST(FormatReal, Shortest) {
    EXPECT_EQ(format_real(0.1), "0.1");
    EXPECT_EQ(format_real(2.0), "2");
    EXPECT_EQ(format_real(1e-7), "1e-07");
}

TEST(ConfigDigest, Golden) {
    EXPECT_EQ(config_digest(c1_config()), "8c3dfc93a1757eea");

    ExperimentConfig f;
    f.algo = Algorithm::wrr;
    f.k = 2.5;
    f.source = MeansSource::file;
    f.means_path = "four.csv";
    f.model = RewardModel::point_mass;
    f.seeds = 3;
    f.base_seed = 7;
    f.batch = 1000;
    EXPECT_EQ(config_digest(f), "097eabd8c781eb35");
}

TEST(ConfigDigest, SensitiveToFields) {
    const auto base = config_digest(c1_config());
    auto c = c1_config();
    c.delta = 0.05;
    EXPECT_NE(config_digest(c), base);
    c = c1_config();
    c.dmin_range.reset();
    EXPECT_NE(config_digest(c), base);
    c = c1_config();
    c.weight = 3;  // ignored outside WRR
    EXPECT_EQ(config_digest(c), base);
}

TEST(GenSynthetic, HitsRequestedGap) {
    struct Case {
        std::size_t n;
        double k;
        DminRange range;
    };
    for (const Case& c : {Case{100, 2.5, {0.1, 0.2}}, Case{900, 2.0, {0.119, 0.121}}, Case{20, 2.0, {0.15, 0.25}}}) {
        Rng rng(derive_seed(1, 0));
        const auto means = gen_synthetic(c.n, c.k, c.range, rng);
        ASSERT_EQ(means.size(), c.n);
        const double gap = min_gap(means, c.k);
        EXPECT_GE(gap, c.range.lo);
        EXPECT_LE(gap, c.range.hi);
        for (double y : means) {
            EXPECT_GE(y, 0.0);
            EXPECT_LT(y, 1.0);
        }
    }
}

TEST(GenSynthetic, RespectsBounds) {
    Rng rng(3);
    for (double y : gen_synthetic(200, 1.0, std::nullopt, rng, Bounds(2.0, 5.0))) {
        EXPECT_GE(y, 2.0);
        EXPECT_LT(y, 5.0);
    }
}

TEST(GenSynthetic, InfeasibleRangeReports) {
    Rng rng(3);
    // A single arm always sits at its own threshold.
    try {
        gen_synthetic(1, 2.0, DminRange{0.1, 0.2}, rng);
        FAIL() << "expected GenerationError";
    } catch (const GenerationError& e) {
        EXPECT_NE(std::string(e.what()).find("n=1"), std::string::npos);
    }
}

TEST(RunTrial, SameInstanceAcrossAlgorithms) {
    auto c = c1_config();
    c.seeds = 1;
    const auto ade = run_trial(c, 0);
    c.algo = Algorithm::wrr;
    c.batch = 1000;
    const auto wrr = run_trial(c, 0);
    EXPECT_EQ(ade.instance.means, wrr.instance.means);
    EXPECT_EQ(ade.record.seed, wrr.record.seed);
    EXPECT_NE(ade.record.config_digest, wrr.record.config_digest);
}

TEST(RunTrial, ErrorsAreRecorded) {
    ExperimentConfig c;
    c.source = MeansSource::file;
    c.means_path = "/nonexistent/means.csv";
    c.k = 1.0;
    const auto out = run_trial(c, 0);
    EXPECT_FALSE(out.record.error.empty());
    EXPECT_FALSE(out.record.terminated);
    EXPECT_FALSE(out.record.correct);
}

TEST(RunExperiment, DeterministicAndJobIndependent) {
    auto c = c1_config();
    c.seeds = 6;
    c.algo = Algorithm::rr;
    c.batch = 200;
    const auto serial = run_experiment(c, 1);
    const auto parallel = run_experiment(c, 4);
    ASSERT_EQ(serial.size(), 6u);
    ASSERT_EQ(parallel.size(), 6u);
    std::ostringstream a, b;
    write_records(a, serial, false);
    write_records(b, parallel, false);
    EXPECT_EQ(a.str(), b.str());
    for (std::size_t i = 1; i < serial.size(); ++i) EXPECT_LT(serial[i - 1].seed, serial[i].seed);
}

TEST(BenchConfig, Expansion) {
    std::istringstream in(R"(# two algorithms, three sizes
algos = ade, wrr
n = 10, 20, 30
k = 2
dmin = 0.1:0.2
seeds = 10
base_seed = 5
baseline_batch = 100
jobs = 3
)");
    const auto plan = parse_bench_config(in);
    EXPECT_EQ(plan.jobs, 3u);
    ASSERT_EQ(plan.configs.size(), 6u);
    EXPECT_EQ(plan.configs[0].algo, Algorithm::ade);
    EXPECT_EQ(plan.configs[0].batch, 1u);
    EXPECT_EQ(plan.configs[1].algo, Algorithm::wrr);
    EXPECT_EQ(plan.configs[1].batch, 100u);
    EXPECT_EQ(plan.configs[1].n, 10u);
    EXPECT_EQ(plan.configs[2].n, 20u);
    for (const auto& c : plan.configs) {
        EXPECT_EQ(c.seeds, 10u);
        EXPECT_EQ(c.base_seed, 5u);
        EXPECT_EQ(c.dmin_range, (DminRange{0.1, 0.2}));
    }
}

TEST(BenchConfig, ErrorsNameTheKey) {
    auto key_of = [](const std::string& text) -> std::string {
        std::istringstream in(text);
        try {
            parse_bench_config(in);
        } catch (const ConfigError& e) {
            return e.key();
        }
        return "";
    };
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\ncolour = red\n"), "colour");
    EXPECT_EQ(key_of("algos = ade, ucb\nn = 5\nk = 2\n"), "algos");
    EXPECT_EQ(key_of("algos = ade\nn = five\nk = 2\n"), "n");
    EXPECT_EQ(key_of("algos = ade\nn = 5\n"), "k");
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\ndelta = 1.5\n"), "delta");
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\ndmin = 0.3:0.1\n"), "dmin");
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\nseeds = 0\n"), "seeds");
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\nk = 3\n"), "k");
    EXPECT_EQ(key_of("algos = ade\nn = 5\nk = 2\nmeans_file = x.csv\n"), "n");
}

TEST(BenchConfig, MeansFile) {
    std::istringstream in("algos = rr\nk = 1\nmeans_file = data/x.csv\nmodel = point-mass\nb = 2\n");
    const auto plan = parse_bench_config(in);
    ASSERT_EQ(plan.configs.size(), 1u);
    EXPECT_EQ(plan.configs[0].source, MeansSource::file);
    EXPECT_EQ(plan.configs[0].means_path, "data/x.csv");
    EXPECT_EQ(plan.configs[0].model, RewardModel::point_mass);
    EXPECT_EQ(plan.configs[0].bounds, Bounds(0.0, 2.0));
}
