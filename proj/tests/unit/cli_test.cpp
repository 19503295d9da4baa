#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "rdual_cli/cli.hpp"

namespace {

using rdual::cli::run;

std::string fixture(const char* name) { return std::string(RDUAL_FIXTURE_DIR) + "/" + name; }

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured call(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Cli, SolveBinomial) {
  const auto r = call({"solve", "--scenario", fixture("binomial.toml")});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("primal value"), std::string::npos);
  EXPECT_NE(r.out.find("weak duality  ok"), std::string::npos);
}

TEST(Cli, SolveJsonReport) {
  const auto r = call({"solve", "--scenario", fixture("trinomial_two_priors.toml"), "--json",
                       "--epsilon-mixing-list", "0.1,0.01"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["schema"], "rdual.report/1");
  EXPECT_EQ(j["command"], "solve");
  EXPECT_TRUE(j["success"].get<bool>());
  EXPECT_EQ(j["epsilon_mixing"].size(), 2u);
  EXPECT_EQ(j["config"]["utility"]["name"], "GLUED");
}

TEST(Cli, ReportFileMatchesStdoutJson) {
  const auto path = std::filesystem::temp_directory_path() / "rdual_cli_test_report.json";
  const auto a = call({"price", "--scenario", fixture("binomial.toml"), "--claim", "up-indicator",
                       "--no-oracle", "--report", path.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  std::ifstream in(path);
  const auto from_file = nlohmann::json::parse(in);
  const auto b = call({"price", "--scenario", fixture("binomial.toml"), "--claim", "up-indicator",
                       "--no-oracle", "--json"});
  EXPECT_EQ(from_file, nlohmann::json::parse(b.out));
  EXPECT_NEAR(from_file["p_b"].get<double>(), 1.0 / 3.0, 1e-6);
  std::filesystem::remove(path);
}

TEST(Cli, Verify) {
  const auto r = call({"verify", "--scenario", fixture("binomial.toml"), "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
}

TEST(Cli, Examples) {
  const auto r = call({"examples", "--n-max", "8"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("1/3"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"solve", "--scenario", fixture("arbitrage.toml")}).code, 2);
  const auto bad = call({"solve", "--scenario", fixture("bad_prior.toml")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("[A1]"), std::string::npos) << bad.err;
  EXPECT_EQ(call({"solve", "--scenario", "/nonexistent.toml"}).code, 2);
  EXPECT_EQ(call({"solve"}).code, 2);
  EXPECT_EQ(call({"frobnicate"}).code, 2);
  EXPECT_EQ(call({"solve", "--scenario", fixture("binomial.toml"), "--tol", "-1"}).code, 2);
  EXPECT_EQ(call({"price", "--scenario", fixture("binomial.toml"), "--claim", "missing"}).code, 2);
  EXPECT_EQ(call({"examples", "--n-max", "2"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(Cli, ToleranceFailureExitCode) {
  // An iteration cap of one primal step cannot close the gap.
  const auto r = call({"solve", "--scenario", fixture("trinomial_two_priors.toml"), "--max-iter", "1",
                       "--tol", "1e-12"});
  EXPECT_EQ(r.code, 3) << r.out << r.err;
}

TEST(Cli, EnvironmentOverridesFileButNotFlags) {
  ::setenv("RDUAL_TOL", "0.5", 1);
  const auto env = call({"solve", "--scenario", fixture("binomial.toml"), "--json"});
  const auto flag = call({"solve", "--scenario", fixture("binomial.toml"), "--json", "--tol", "0.25"});
  ::unsetenv("RDUAL_TOL");
  ASSERT_EQ(env.code, 0) << env.err;
  ASSERT_EQ(flag.code, 0) << flag.err;
  EXPECT_EQ(nlohmann::json::parse(env.out)["resolved"]["tol"].get<double>(), 0.5);
  EXPECT_EQ(nlohmann::json::parse(flag.out)["resolved"]["tol"].get<double>(), 0.25);
}

}  // namespace
