#include <gtest/gtest.h>

#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code = -1;
    std::string out;
};

fs::path scratch() {
    const fs::path dir = fs::path(OB_TEST_TMP) / ::testing::UnitTest::GetInstance()->current_test_info()->name();
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome cli(const std::string& args, const std::string& env = "") {
    const fs::path out = scratch() / "stdout.txt";
    const std::string cmd = env + " \"" OB_CLI_PATH "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out)};
}

fs::path four_csv() {
    const fs::path p = scratch() / "four.csv";
    std::ofstream(p) << "0.2\n0.4\n0.6\n0.8\n";
    return p;
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST(Cli, RunPointMassFixture) {
    const auto r = cli("run --algo ade --means " + four_csv().string() +
                       " --k 1 --delta 0.1 --seed 7 --b 1 --model point-mass");
    ASSERT_EQ(r.code, 0);
    const auto ls = lines(r.out);
    ASSERT_EQ(ls.size(), 2u);
    const auto rec = nlohmann::json::parse(ls[0]);
    EXPECT_EQ(rec["algo"], "ADE");
    EXPECT_EQ(rec["terminated"], true);
    EXPECT_EQ(rec["correct"], true);
    const auto arms = nlohmann::json::parse(ls[1]);
    EXPECT_EQ(arms["outliers"], nlohmann::json::array({4}));
    EXPECT_EQ(arms["normals"], nlohmann::json::array({1, 2, 3}));
}

TEST(Cli, RunAllAlgorithmsAgree) {
    for (const char* algo : {"ade", "rr", "wrr"}) {
        const auto r = cli(std::string("run --algo ") + algo + " --means " + four_csv().string() +
                           " --k 1 --seed 3 --model point-mass");
        ASSERT_EQ(r.code, 0) << algo;
        EXPECT_EQ(nlohmann::json::parse(lines(r.out)[1])["outliers"], nlohmann::json::array({4})) << algo;
    }
}

TEST(Cli, MissingKIsUsageError) {
    EXPECT_EQ(cli("run --algo ade --means " + four_csv().string()).code, 1);
}

TEST(Cli, MeansAndSyntheticConflict) {
    EXPECT_EQ(cli("run --algo ade --means " + four_csv().string() + " --synthetic --n 5 --k 1").code, 1);
    EXPECT_EQ(cli("run --algo ade --k 1").code, 1);
}

TEST(Cli, BadInputs) {
    EXPECT_EQ(cli("run --algo lucb --synthetic --n 5 --k 1").code, 1);
    EXPECT_EQ(cli("run --algo ade --means /nonexistent.csv --k 1").code, 1);
    EXPECT_EQ(cli("run --algo ade --synthetic --n 5 --k 1 --delta 2").code, 1);
    EXPECT_EQ(cli("").code, 1);
    EXPECT_EQ(cli("--help").code, 0);
}

TEST(Cli, BudgetAbortExitsTwo) {
    const auto r = cli("run --algo ade --synthetic --n 10 --k 2 --seed 1 --max-pulls 10");
    EXPECT_EQ(r.code, 2);
    EXPECT_EQ(nlohmann::json::parse(lines(r.out)[0])["terminated"], false);
    EXPECT_EQ(cli("run --algo wrr --means " + four_csv().string() + " --k 1 --max-pulls 10").code, 2);
}

TEST(Cli, SeedFromEnvironment) {
    const std::string args = "run --algo rr --synthetic --n 8 --k 1.5 --batch 50";
    const auto flag = cli(args + " --seed 19");
    const auto env = cli(args, "BANDIT_OUTLIER_SEED=19");
    const auto other = cli(args, "BANDIT_OUTLIER_SEED=20");
    ASSERT_EQ(flag.code, 0);
    auto strip = [](const std::string& line) {
        auto j = nlohmann::json::parse(line);
        j.erase("wall_ms");
        return j.dump();
    };
    EXPECT_EQ(strip(lines(flag.out)[0]), strip(lines(env.out)[0]));
    EXPECT_NE(strip(lines(flag.out)[0]), strip(lines(other.out)[0]));
    EXPECT_EQ(cli(args, "BANDIT_OUTLIER_SEED=abc").code, 1);
}

TEST(Cli, OutFileAndPretty) {
    const fs::path out = scratch() / "run.jsonl";
    ASSERT_EQ(cli("run --algo ade --means " + four_csv().string() + " --k 1 --model point-mass --out " + out.string())
                  .code,
              0);
    EXPECT_EQ(lines(slurp(out)).size(), 2u);
    const auto pretty = cli("run --algo ade --means " + four_csv().string() + " --k 1 --model point-mass --pretty");
    EXPECT_NE(pretty.out.find("outliers:    4"), std::string::npos) << pretty.out;
}

TEST(Cli, BenchCardinalityAndRerun) {
    const fs::path dir = scratch();
    const fs::path config = dir / "bench.cfg";
    std::ofstream(config) << "algos = ade, rr\nn = 5, 8, 10\nk = 1.5\ndmin = 0.1:0.3\nseeds = 10\n"
                             "baseline_batch = 100\n";
    const auto a = cli("bench --config " + config.string() + " --out-dir " + (dir / "a").string() + " --no-timing");
    const auto b = cli("bench --config " + config.string() + " --out-dir " + (dir / "b").string() +
                       " --no-timing --jobs 4");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    const auto recs = slurp(dir / "a" / "records.jsonl");
    EXPECT_EQ(lines(recs).size(), 60u);
    EXPECT_EQ(lines(slurp(dir / "a" / "summary.csv")).size(), 7u);
    EXPECT_EQ(recs, slurp(dir / "b" / "records.jsonl"));
    EXPECT_EQ(slurp(dir / "a" / "summary.csv"), slurp(dir / "b" / "summary.csv"));
}

TEST(Cli, BenchConfigErrorNamesKey) {
    const fs::path config = scratch() / "bad.cfg";
    std::ofstream(config) << "algos = ade\nn = 5\nk = 1\nbogus = 1\n";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = "\"" OB_CLI_PATH "\" bench --config " + config.string() + " --out-dir " +
                            (scratch() / "o").string() + " > /dev/null 2> " + err.string();
    const int status = std::system(cmd.c_str());
    EXPECT_EQ(WEXITSTATUS(status), 1);
    EXPECT_NE(slurp(err).find("bogus"), std::string::npos);
}

TEST(Cli, GenWritesLoadableCsv) {
    const fs::path out = scratch() / "gen.csv";
    ASSERT_EQ(cli("gen --n 30 --k 2 --dmin 0.05,0.3 --seed 4 --out " + out.string()).code, 0);
    const auto ls = lines(slurp(out));
    ASSERT_EQ(ls.size(), 31u);
    EXPECT_EQ(ls[0], "arm_id,mean");
    EXPECT_EQ(cli("run --algo ade --means " + out.string() + " --k 2 --model point-mass").code, 0);

    const auto crowd = cli("gen --standin-crowd --seed 1");
    ASSERT_EQ(crowd.code, 0);
    EXPECT_EQ(lines(crowd.out).size(), 723u);
    EXPECT_EQ(cli("gen --dmin 0.1,0.2").code, 1);
}

TEST(Cli, VerifyQuickPassesWithinPinnedTime) {
    const auto start = std::chrono::steady_clock::now();
    const auto r = cli("verify --quick");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_NE(r.out.find("verify: 60 checks, 0 failed, reps=10000"), std::string::npos);
    // Measured at 1.4 s on one core (release build); pinned at twice that.
    EXPECT_LT(seconds, 2.8);
}

TEST(Cli, VerifyReportsInjectedFault) {
    const auto r = cli("verify --quick --theta-radius-scale 0.1");
    EXPECT_NE(r.code, 0);
    EXPECT_NE(r.out.find("FAIL L4"), std::string::npos);
    EXPECT_EQ(r.out.find("FAIL L1"), std::string::npos);
}
