#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "sgp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = sgp::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("sgp_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string file(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

const std::vector<std::string> kAr1 = {"simulate", "--process", "ar1",  "--alpha", "2",    "--beta", "1",
                                       "--rho",    "0.5",       "--n",  "1000",    "--paths", "10",  "--seed",
                                       "42"};

std::vector<std::string> with(std::vector<std::string> base, std::initializer_list<std::string> extra) {
    base.insert(base.end(), extra);
    return base;
}

}  // namespace

TEST_F(CliTest, SimulateCsvRowCountAndDeterminism) {
    ASSERT_EQ(run(with(kAr1, {"--out", file("a.csv")})).code, 0);
    ASSERT_EQ(run(with(kAr1, {"--out", file("b.csv")})).code, 0);
    const std::string a = slurp(file("a.csv"));
    EXPECT_EQ(a, slurp(file("b.csv")));
    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "path,t,value");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 10000);
}

TEST_F(CliTest, ThreadCountDoesNotChangeBytes) {
    for (const char* proc : {"ar1", "rm", "cir", "cthin"}) {
        const auto base = std::vector<std::string>{"simulate", "--process", proc, "--lambda", "0.4", "--n", "20",
                                                   "--paths",  "64"};
        ASSERT_EQ(run(with(base, {"--threads", "1", "--out", file("t1")})).code, 0);
        ASSERT_EQ(run(with(base, {"--threads", "5", "--out", file("t5")})).code, 0);
        ASSERT_EQ(run(with(base, {"--threads", "5", "--format", "json", "--out", file("j5")})).code, 0);
        ASSERT_EQ(run(with(base, {"--threads", "1", "--format", "json", "--out", file("j1")})).code, 0);
        EXPECT_EQ(slurp(file("t1")), slurp(file("t5"))) << proc;
        EXPECT_EQ(slurp(file("j1")), slurp(file("j5"))) << proc;
    }
}

TEST_F(CliTest, JsonMatchesCsvValues) {
    ASSERT_EQ(run(with(kAr1, {"--out", file("a.csv")})).code, 0);
    ASSERT_EQ(run(with(kAr1, {"--format", "json", "--out", file("a.json")})).code, 0);
    const json j = json::parse(slurp(file("a.json")));
    EXPECT_EQ(j["config"]["process"], "ar1");
    EXPECT_EQ(j["config"]["seed"], 42);
    EXPECT_TRUE(j.contains("version"));
    std::istringstream in(slurp(file("a.csv")));
    std::string line;
    std::getline(in, line);
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::size_t m = 0;
        double t = 0, v = 0;
        ASSERT_EQ(std::sscanf(line.c_str(), "%zu,%lf,%lf", &m, &t, &v), 3);
        const std::size_t k = rows % 1000;
        EXPECT_EQ(j["times"][k].get<double>(), t);
        EXPECT_EQ(j["paths"][m][k].get<double>(), v);
        ++rows;
    }
    EXPECT_EQ(rows, 10000u);
}

TEST_F(CliTest, LambdaAndRhoGiveIdenticalEnsembles) {
    const double lam = 0.7;
    char rho[64];
    std::snprintf(rho, sizeof rho, "%.17g", std::exp(-lam));
    for (const char* proc : {"ar1", "thinned", "rm", "changepoint", "cir", "cthin"}) {
        const auto base = std::vector<std::string>{"simulate", "--process", proc, "--n", "30", "--paths", "8"};
        ASSERT_EQ(run(with(base, {"--lambda", "0.7", "--out", file("l")})).code, 0);
        ASSERT_EQ(run(with(base, {"--rho", rho, "--out", file("r")})).code, 0);
        EXPECT_EQ(slurp(file("l")), slurp(file("r"))) << proc;
    }
}

TEST_F(CliTest, ParameterErrorsExitTwo) {
    const Result r = run({"simulate", "--process", "ar1", "--rho", "1.5", "--n", "10"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("rho must lie in (0, 1)"), std::string::npos) << r.err;
    EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
    EXPECT_EQ(run({"simulate", "--process", "ar1", "--rho", "0.5", "--lambda", "1"}).code, 2);
    EXPECT_EQ(run({"simulate", "--process", "ar1", "--n", "10"}).code, 2);
    EXPECT_EQ(run({"simulate", "--process", "gauss", "--rho", "0.5"}).code, 2);
    EXPECT_EQ(run({"simulate", "--process", "ar1", "--rho", "0.5", "--alpha", "-1"}).code, 2);
    EXPECT_EQ(run({"simulate", "--process", "ar1", "--rho", "0.5", "--format", "xml"}).code, 2);
    EXPECT_EQ(run({"simulate", "--process", "cir", "--rho", "0.5", "--alpha", "1.2", "--cir-method", "squared-ou"}).code,
              2);
    EXPECT_EQ(run({"simulate", "--process", "ar1", "--rho", "0.5", "--n", "abc"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, IoErrorsExitThree) {
    EXPECT_EQ(run(with(kAr1, {"--out", (dir_ / "missing" / "x.csv").string()})).code, 3);
    EXPECT_EQ(run({"simulate", "--process", "rm", "--rho", "0.5", "--times", file("nope.txt")}).code, 3);
}

TEST_F(CliTest, TimesFile) {
    std::ofstream(file("t.txt")) << "0 0.5\n1.75 3\n";
    const Result r = run({"simulate", "--process", "changepoint", "--rho", "0.5", "--times", file("t.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("\n0,1.75,"), std::string::npos);
    std::ofstream(file("bad.txt")) << "0 1 1\n";
    EXPECT_EQ(run({"simulate", "--process", "changepoint", "--rho", "0.5", "--times", file("bad.txt")}).code, 2);
}

TEST_F(CliTest, VerifyAr1AllPasses) {
    const Result r = run({"verify", "--process", "ar1", "--suite", "all"});
    ASSERT_EQ(r.code, 0) << r.out << r.err;
    const json j = json::parse(r.out);
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_EQ(j["config"]["alpha"], 2.0);
    EXPECT_EQ(j["config"]["rho"], 0.5);
    bool skipped_generator = false;
    for (const auto& c : j["checks"]) {
        if (c["name"] == "generator") skipped_generator = c["status"] == "skipped";
        if (c.contains("passed")) {
            EXPECT_TRUE(c.contains("statistic") || c["name"] == "tail.monotone");
        }
    }
    EXPECT_TRUE(skipped_generator);
}

TEST_F(CliTest, VerifyForcedFormulaFails) {
    ::setenv("SGP_VERIFY_FORCE_FORMULA", "thinned", 1);
    const Result r = run({"verify", "--process", "ar1", "--alpha", "1", "--suite", "chf"});
    ::unsetenv("SGP_VERIFY_FORCE_FORMULA");
    EXPECT_EQ(r.code, 1);
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["passed"].get<bool>());
    const json& chf = j["checks"][0];
    EXPECT_EQ(chf["formula"], "thinned");
    EXPECT_FALSE(chf["failing_omegas"].empty());
    EXPECT_EQ(chf["argmax_omega"].size(), 2u);
}

TEST_F(CliTest, VerifyTailTableAndSkippedChf) {
    const Result t = run({"verify", "--process", "ar1", "--suite", "tail", "--alpha", "1"});
    ASSERT_EQ(t.code, 0);
    const json j = json::parse(t.out);
    const json& table = j["checks"][0]["table"];
    ASSERT_GE(table.size(), 5u);
    EXPECT_TRUE(table[0].contains("neglog_survival_ratio"));
    EXPECT_TRUE(table[0].contains("approx_log_ratio"));

    const Result c = run({"verify", "--process", "cthin", "--suite", "chf", "--paths", "1000"});
    ASSERT_EQ(c.code, 0);
    const json k = json::parse(c.out);
    EXPECT_EQ(k["checks"][0]["status"], "skipped");
}

TEST_F(CliTest, VerifyGeneratorForCir) {
    const Result r = run({"verify", "--process", "cir", "--suite", "generator", "--alpha", "1"});
    ASSERT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(json::parse(r.out)["checks"].size(), 4u);
}

TEST_F(CliTest, VerifyReportToFile) {
    ASSERT_EQ(run({"verify", "--process", "changepoint", "--suite", "marginal", "--paths", "2000", "--out", file("r.json")})
                  .code,
              0);
    EXPECT_TRUE(json::parse(slurp(file("r.json")))["passed"].get<bool>());
    EXPECT_EQ(run({"verify", "--process", "ar1", "--suite", "everything"}).code, 2);
}

TEST_F(CliTest, CompareReports) {
    const Result pairs = run({"compare", "--process", "thinned", "--process-b", "rm", "--alpha", "1", "--rho", "0.5",
                              "--points", "2"});
    ASSERT_EQ(pairs.code, 0) << pairs.err;
    const json p = json::parse(pairs.out);
    EXPECT_LT(p["pairwise"]["max_z"].get<double>(), 4.0);
    EXPECT_FALSE(p.contains("triplet"));

    const Result null3 =
        run({"compare", "--process", "ar1", "--process-b", "ar1", "--alpha", "1", "--rho", "0.5", "--seed", "5"});
    ASSERT_EQ(null3.code, 0);
    const json n = json::parse(null3.out);
    EXPECT_LT(n["triplet"]["max_z"].get<double>(), 4.0);
    EXPECT_EQ(n["b"]["seed"], 6);
}

TEST_F(CliTest, CompareMismatchExitsTwo) {
    EXPECT_EQ(run({"compare", "--process", "thinned", "--process-b", "rm", "--rho", "0.5", "--alpha-b", "3"}).code, 2);
    EXPECT_EQ(run({"compare", "--process", "thinned", "--process-b", "rm", "--rho", "0.5", "--lambda-b", "2"}).code, 2);
    EXPECT_EQ(run({"compare", "--process", "thinned", "--process-b", "rm", "--rho", "0.5", "--points", "4"}).code, 2);
}
