#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fpdtl/cli.hpp"
#include "fpdtl/harness.hpp"
#include "fpdtl/io.hpp"

namespace fs = std::filesystem;
using namespace fpdtl;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "fpdtl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::parse_and_dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fpdtl_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, HelpAndVersion) {
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  const auto v = run({"--version"});
  EXPECT_EQ(v.code, cli::kExitOk);
  EXPECT_NE(v.out.find(cli::kVersion), std::string::npos);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"run-experiment", "--epsilon", "1.5", "--out", path("x")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"run-experiment", "--states", "4", "--out", path("x")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"run-experiment", "--methods", "Rand,Bogus", "--out", path("x")}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"solve-fpd", "--model", path("missing.json"), "--ideal", path("missing.json")}).code,
            cli::kExitUsage);
}

TEST_F(CliTest, GenerateSolveAndData) {
  ASSERT_EQ(run({"generate-system", "--seed", "3", "--out", path("model.json")}).code, 0);
  io::write_json(path("ideal.json"), io::to_json(harness::make_current_ideal({3, 4})));
  ASSERT_EQ(run({"solve-fpd", "--model", path("model.json"), "--ideal", path("ideal.json"), "--horizon", "4",
                 "--out", path("policy.json")})
                .code,
            0);
  const auto policy = io::policy_from_json(io::read_json(path("policy.json")));
  EXPECT_EQ(policy.horizon(), 4u);

  ASSERT_EQ(run({"generate-data", "--model", path("model.json"), "--past-ideal", "P3", "--k", "25", "--out",
                 path("data.json"), "--weights", path("w.csv"), "--stats-dir", path("stats")})
                .code,
            0);
  EXPECT_EQ(io::record_from_json(io::read_json(path("data.json"))).size(), 25u);
  EXPECT_TRUE(fs::exists(path("w.csv")));
  EXPECT_TRUE(fs::exists(dir_ / "stats" / "concentrations.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "stats" / "window.csv"));

  EXPECT_EQ(run({"generate-data", "--model", path("model.json"), "--past-ideal", "P1", "--ideal",
                 path("ideal.json")})
                .code,
            cli::kExitUsage);
}

TEST_F(CliTest, RunExperimentOutputsAndOverrides) {
  std::ofstream(path("cfg.json")) << R"({"n_reps": 4, "h_current": 30, "past_ideal": "P12", "epsilon": 0.2})";
  const auto r = run({"run-experiment", "--config", path("cfg.json"), "--reps", "3", "--out", path("out")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"runs.csv", "summary.csv", "summary_minus_rand.csv", "effective_config.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  }
  const auto eff = io::read_json(path("out/effective_config.json"));
  EXPECT_EQ(eff.at("n_reps"), 3);
  EXPECT_EQ(eff.at("h_current"), 30);
  EXPECT_EQ(eff.at("past_ideal"), "P12");
  EXPECT_EQ(eff.at("epsilon"), 0.2);
  EXPECT_NE(r.out.find("median"), std::string::npos);

  // Feeding the effective config back reproduces the runs exactly.
  ASSERT_EQ(run({"run-experiment", "--config", path("out/effective_config.json"), "--out", path("again")}).code, 0);
  EXPECT_EQ(slurp(dir_ / "out" / "runs.csv"), slurp(dir_ / "again" / "runs.csv"));
}

TEST_F(CliTest, BenchWritesCsv) {
  const auto r = run({"bench", "--states", "3,6", "--repeats", "11", "--out", path("bench")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto text = slurp(dir_ / "bench" / "bench.csv");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5);
  EXPECT_EQ(run({"bench", "--repeats", "3"}).code, cli::kExitUsage);
}
