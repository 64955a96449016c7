#include "cli_app.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace matnorm;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "matnorm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / ("matnorm_test_" + name);
  std::ofstream(path) << text;
  return path;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST(Cli, EstimateWritesMatrix) {
  const auto input = write_temp("x.csv", "10,0,0\n0,5,0\n0,0,1\n0,0,0\n0,0,0\n");
  const auto r = run({"estimate", "--input", input.string(), "--spec", "nns"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Matrix y = [&] {
    std::istringstream in(r.out);
    return read_matrix_csv(in);
  }();
  ASSERT_EQ(y.rows(), 5);
  EXPECT_NEAR(y(0, 0), 9.5, 1e-12);
  EXPECT_NEAR(y(2, 2), 0.5, 1e-12);
}

TEST(Cli, SurePrintsOracleValue) {
  const auto input = write_temp("s.csv", "10,0,0\n0,5,0\n0,0,1\n0,0,0\n0,0,0\n");
  const auto r = run({"sure", "--input", input.string(), "--spec", "sure:p=1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::stod(r.out), 12.990413223140495868, 1e-10);
  EXPECT_EQ(run({"sure", "--input", input.string(), "--spec", "nns+"}).code, cli::kExitUsage);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"estimate", "--spec", "nns"}).code, cli::kExitUsage);
  const auto ragged = write_temp("r.csv", "1,2\n3\n");
  EXPECT_EQ(run({"estimate", "--input", ragged.string(), "--spec", "nns"}).code, cli::kExitUsage);
  const auto zero = write_temp("z.csv", "0,0\n0,0\n0,0\n0,0\n");
  EXPECT_EQ(run({"estimate", "--input", zero.string(), "--spec", "js"}).code, cli::kExitNumerical);
  EXPECT_EQ(run({"risk-sweep", "--scenario", "nope"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"check-prior", "--p", "1", "--n", "5", "--m", "3"}).code, cli::kExitUsage);
}

TEST(Cli, RiskSweepCsv) {
  const auto r = run({"risk-sweep", "--scenario", "fig1b", "--grid", "0,5", "--spec", "js;nns+",
                      "--replicates", "50", "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 5u);
  EXPECT_EQ(l[0], kRiskCsvHeader);
  EXPECT_EQ(l[1].rfind("fig1b,js,0,50,7,", 0), 0u) << l[1];
  EXPECT_EQ(l[4].rfind("fig1b,nns+,5,50,7,", 0), 0u) << l[4];
}

TEST(Cli, RiskSweepCustomWithBayesRows) {
  const auto r = run({"risk-sweep", "--n", "5", "--m", "3", "--profile", "x,0.5x,0", "--grid", "2", "--spec", "js",
                      "--prior", "uniform", "--replicates", "20", "--is-samples", "50"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_NE(l[2].find(",bayes:uniform,2,"), std::string::npos) << l[2];
}

TEST(Cli, ConfigFileAndFlagOverride) {
  const auto cfg = write_temp("cfg.json", R"({"scenario": "fig1b", "grid": [1, 2], "spec": ["js"],
                                             "replicates": 30, "seed": 3})");
  const auto a = run({"risk-sweep", "--config", cfg.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(lines(a.out).size(), 3u);
  const auto b = run({"risk-sweep", "--config", cfg.string(), "--seed", "4"});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_NE(lines(b.out)[1].find(",30,4,"), std::string::npos);
  const auto bad = write_temp("bad.json", "{ not json");
  EXPECT_EQ(run({"risk-sweep", "--config", bad.string()}).code, cli::kExitUsage);
}

TEST(Cli, PredictRiskCsv) {
  const auto r = run({"predict-risk", "--scenario", "fig3b", "--grid", "10", "--prior", "uniform;svs",
                      "--replicates", "10", "--is-samples", "200", "--seed", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], kKlCsvHeader);
  EXPECT_EQ(l[1].rfind("uniform,10,0,0,10,200,2,", 0), 0u) << l[1];
  EXPECT_EQ(l[2].rfind("svs,10,0,0,", 0), 0u) << l[2];
}

TEST(Cli, CheckPriorExitCodes) {
  const auto ok = run({"check-prior", "--p", "1", "--alpha", "8", "--n", "5", "--m", "3", "--samples", "200"});
  EXPECT_EQ(ok.code, 0) << ok.err;
  EXPECT_NE(ok.out.find("violations=0"), std::string::npos);
  const auto bad = run({"check-prior", "--p", "1", "--alpha", "9", "--n", "5", "--m", "3", "--samples", "200"});
  EXPECT_EQ(bad.code, cli::kExitCheckFailed);
  EXPECT_NE(bad.out.find("NOT superharmonic"), std::string::npos);
}

TEST(Cli, VerifyLemmas) {
  const auto r = run({"verify-lemmas", "--count", "500"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto l = lines(r.out);
  ASSERT_EQ(l.size(), 5u);
  for (const auto& line : l) EXPECT_NE(line.find("failed=0"), std::string::npos) << line;
}

TEST(Cli, BinaryRunsAndWritesFile) {
  const fs::path out = fs::temp_directory_path() / "matnorm_test_lemmas.txt";
  fs::remove(out);
  const std::string cmd = std::string(MATNORM_CLI_PATH) + " verify-lemmas --count 100 --out " + out.string();
  ASSERT_EQ(std::system(cmd.c_str()), 0);
  std::ifstream in(out);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("ratio_monotone passed=100", 0), 0u) << first;
}
