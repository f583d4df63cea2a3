#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cordet/cli.hpp"
#include "cordet/model.hpp"

namespace cordet {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      lines.push_back(line);
    }
  }
  return lines;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("cordet_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, GenIsDeterministic) {
  const std::vector<std::string> base{"gen", "--hypothesis", "h0", "--n", "4", "--d", "3",
                                      "--rho", "0.5", "--seed", "7", "--out"};
  auto a = base;
  a.push_back(path("a.cdb"));
  auto b = base;
  b.push_back(path("b.cdb"));
  ASSERT_EQ(run(a).code, kExitOk);
  ASSERT_EQ(run(b).code, kExitOk);
  EXPECT_EQ(slurp(path("a.cdb")), slurp(path("b.cdb")));
}

TEST_F(CliTest, GenRejectsZeroRho) {
  const auto r = run({"gen", "--n", "4", "--d", "3", "--rho", "0", "--out", path("z.cdb")});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, GenUnitCorrelationCopiesX) {
  ASSERT_EQ(run({"gen", "--hypothesis", "h1", "--rho", "1", "--sigma", "id", "--n", "5", "--d",
                 "2", "--out", path("c.cdb")})
                .code,
            kExitOk);
  const auto db = read_database(path("c.cdb"));
  EXPECT_EQ(db.data.x, db.data.y);
}

TEST_F(CliTest, GenSigmaFromFile) {
  std::ofstream(path("sigma.txt")) << "2 3 1\n";
  const auto r = run({"gen", "--hypothesis", "h1", "--rho", "1", "--sigma", "file", "--sigma-file",
                      path("sigma.txt"), "--n", "3", "--d", "2", "--out", path("s.cdb")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto db = read_database(path("s.cdb"));
  // Y_{sigma(i)} = X_i
  EXPECT_EQ(db.data.y.row(1), db.data.x.row(0));
  EXPECT_EQ(db.data.y.row(0), db.data.x.row(2));
}

TEST_F(CliTest, RiskSmoke) {
  const auto r = run({"risk", "--test", "sum", "--n", "5", "--d", "60", "--rho", "1", "--trials",
                      "200"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[0].find("risk_hat"), std::string::npos);
  EXPECT_EQ(lines[1].substr(0, 21), "5,60,1,1,sum,200,0,0.");
  EXPECT_NE(r.out.find("# cordet "), std::string::npos);
  EXPECT_NE(r.out.find("# seed: 1"), std::string::npos);
}

TEST_F(CliTest, RiskUnknownTest) {
  EXPECT_EQ(run({"risk", "--test", "bogus", "--n", "5", "--d", "6", "--rho", "0.5"}).code,
            kExitUsage);
}

TEST_F(CliTest, RiskJson) {
  const auto r = run({"risk", "--test", "max", "--n", "4", "--d", "3", "--rho", "0.5",
                      "--trials", "100", "--format", "json", "--seed", "9"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["meta"]["seed"], 9);
  EXPECT_EQ(j["meta"]["command"], "risk");
  ASSERT_EQ(j["records"].size(), 1u);
  const auto& rec = j["records"][0];
  EXPECT_EQ(rec["test"], "max");
  const auto& est = rec["estimate"];
  EXPECT_EQ(est["risk_hat"].get<double>(),
            est["type1_hat"].get<double>() + est["type2_hat"].get<double>());
  EXPECT_TRUE(rec["bounds"]["regime"].is_string());
}

TEST_F(CliTest, ThreadCountDoesNotChangeOutput) {
  const std::vector<std::string> base{"risk", "--test", "count", "--n", "6", "--d", "3",
                                      "--rho", "0.7", "--trials", "300", "--threads"};
  auto one = base;
  one.push_back("1");
  auto four = base;
  four.push_back("4");
  EXPECT_EQ(data_lines(run(one).out), data_lines(run(four).out));
}

TEST_F(CliTest, SweepSinglePointEqualsRisk) {
  const auto risk = run({"risk", "--test", "sum", "--n", "8", "--d", "10", "--rho", "0.5",
                         "--trials", "150", "--seed", "3"});
  const auto sw = run({"sweep", "--n-list", "8", "--d-list", "10", "--rho2-list", "0.25",
                       "--tests", "sum", "--trials", "150", "--seed", "3"});
  ASSERT_EQ(sw.code, kExitOk) << sw.err;
  EXPECT_EQ(data_lines(risk.out), data_lines(sw.out));
}

TEST_F(CliTest, SweepRuleOneOverD) {
  const auto r = run({"sweep", "--rho2-rule", "one_over_d", "--n-list", "10", "--d-list",
                      "100,1000", "--trials", "100"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0],
            "n,d,rho,rho_sq,test,trials,type1_hat,type1_ci,type2_hat,type2_ci,risk_hat,seed,"
            "bound_sum_risk,bound_count_t1,bound_count_t2,chi2_general,risk_lower,regime");
  EXPECT_EQ(lines[1].substr(0, 8), "10,100,0");
  EXPECT_NE(lines[1].find(",0.01000000000000000"), std::string::npos);
  EXPECT_EQ(lines[2].substr(0, 9), "10,1000,0");
}

TEST_F(CliTest, SweepCountScalingRule) {
  const auto r = run({"sweep", "--rho2-rule", "count_scaling(0.1)", "--n-list", "200",
                      "--d-list", "3", "--trials", "100", "--tests", "count"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto lines = data_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  std::vector<std::string> cells;
  std::stringstream row(lines[1]);
  for (std::string cell; std::getline(row, cell, ',');) {
    cells.push_back(cell);
  }
  ASSERT_GE(cells.size(), 5u);
  EXPECT_NEAR(std::stod(cells[3]), 1.0 - 0.1 / 200.0, 1e-15);
  EXPECT_EQ(cells[4], "count");
}

TEST_F(CliTest, SweepEmptyGrid) {
  EXPECT_EQ(run({"sweep", "--n-list", "", "--d-list", "3", "--rho2-list", "0.5"}).code,
            kExitUsage);
  EXPECT_EQ(run({"sweep", "--n-list", "5", "--d-list", "3"}).code, kExitUsage);
}

TEST_F(CliTest, BoundsFixedDimension) {
  const auto r = run({"bounds", "--n", "100", "--d", "3", "--rho2", "0.05"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["regime"], "strong_impossible_fixed_d");
  EXPECT_GT(j["thresholds"]["rho_star_sq"].get<double>(), 0.05);
}

TEST_F(CliTest, BoundsSumEnvelope) {
  const auto r = run({"bounds", "--d", "60", "--rho2", "1"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["sum_risk_bound"].get<double>(), 0.735759, 1e-6);
  EXPECT_TRUE(j["params"]["n"].is_null());
}

TEST_F(CliTest, BoundsMissingFlag) {
  EXPECT_EQ(run({"bounds", "--rho2", "0.3"}).code, kExitUsage);
  EXPECT_EQ(run({"bounds", "--d", "3"}).code, kExitUsage);
}

TEST_F(CliTest, VerifyPerms) {
  const auto r = run({"verify", "--suite", "perms", "--n-max", "7"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST_F(CliTest, VerifyLemmaCycle) {
  const auto r = run({"verify", "--suite", "lemma-cycle", "--k", "2", "--d", "2", "--rho", "0.3",
                      "--trials", "1000000"});
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("1/1 checks passed"), std::string::npos);
}

TEST_F(CliTest, ConfigFileWithFlagOverride) {
  std::ofstream(path("run.cfg")) << "# risk settings\n"
                                    "n = 5\nd = 60\nrho = 1\ntrials = 200\nseed = 11\n";
  const auto from_file = run({"risk", "--config", path("run.cfg")});
  ASSERT_EQ(from_file.code, kExitOk) << from_file.err;
  EXPECT_NE(from_file.out.find("# seed: 11"), std::string::npos);
  const auto overridden = run({"risk", "--config", path("run.cfg"), "--seed", "12"});
  ASSERT_EQ(overridden.code, kExitOk) << overridden.err;
  EXPECT_NE(overridden.out.find("# seed: 12"), std::string::npos);
}

TEST(ConfigText, Parsing) {
  const auto entries = parse_config_text("a = 1\n\n; note\n  b=two words \n");
  ASSERT_EQ(entries.size(), 2u);
  EXPECT_EQ(entries[1].first, "b");
  EXPECT_EQ(entries[1].second, "two words");
  EXPECT_THROW(parse_config_text("novalue\n"), std::invalid_argument);
}

TEST(Cli, HelpAndNoCommand) {
  std::ostringstream out, err;
  EXPECT_EQ(run_cli({"--help"}, out, err), kExitOk);
  EXPECT_NE(out.str().find("sweep"), std::string::npos);
  EXPECT_EQ(run_cli({}, out, err), kExitUsage);
}

}  // namespace
}  // namespace cordet
