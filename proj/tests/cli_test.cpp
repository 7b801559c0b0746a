// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <sstream>

#include "loopbench/cli.hpp"
#include "test_support.hpp"

using namespace loopbench;

namespace {

struct CliResult {
  int code = 0;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "loopbench");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("loopbench_cli_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, OracleFiveCycle) {
  const auto r = cli({"oracle", "--cycle", "5", "--colors", "2"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "min_conflicts=1 chromatic=3\n");
}

TEST(Cli, OracleCapacityError) {
  const auto r = cli({"oracle", "--cycle", "40", "--colors", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("error kind=capacity message=\"", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, UnknownFlagIsUsageError) {
  const auto r = cli({"oracle", "--cycle", "5", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error kind=usage ", 0), 0u);
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
}

TEST(Cli, InvalidConfigIsExitTwo) {
  const auto dir = scratch("badcfg");
  support::write_file(dir / "bad.toml", "[graph]\nn = 1\n");
  const auto r = cli({"run", "--config", (dir / "bad.toml").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(r.err.rfind("error kind=config ", 0), 0u);
  EXPECT_EQ(cli({"run", "--config", (dir / "missing.toml").string()}).code, 2);
  std::filesystem::remove_all(dir);
}

TEST(Cli, HelpExitsZero) { EXPECT_EQ(cli({"--help"}).code, 0); }

TEST(Cli, RunWritesTracesAndRow) {
  const auto dir = scratch("run");
  support::write_file(dir / "c3_softfp.toml", "[graph]\nn = 3\n[agent]\npolicy = \"soft_fp\"\n");
  const auto r = cli({"run", "--config", (dir / "c3_softfp.toml").string(), "--seed", "9", "--steps", "6",
                      "--repeats", "2", "--out", (dir / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("graph,agent,proximity_mean,proximity_std,stability_mean,stability_std,repeats\nC3,soft_fp,", 0),
            0u);
  EXPECT_NE(r.out.find("aborted=0\n"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "C3_soft_fp" / "run1.jsonl"));
  EXPECT_FALSE(std::filesystem::exists(dir / "out" / "C3_soft_fp" / "run2.jsonl"));

  const auto agg = cli({"aggregate", (dir / "out").string()});
  ASSERT_EQ(agg.code, 0) << agg.err;
  const std::string row = r.out.substr(r.out.find('\n') + 1, r.out.find("traces=") - r.out.find('\n') - 1);
  EXPECT_EQ(agg.out, std::string(kCsvHeader) + "\n" + row);
  std::filesystem::remove_all(dir);
}

TEST(Cli, StrategiesFromFixtureTrace) {
  const auto r = cli({"strategies", "--trace", (support::data_dir() / "golden" / "scripted_c3_run0.jsonl").string(),
                      "--node", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(support::matches_golden("strategies_c3_node1.txt", r.out));
  const auto all = cli({"strategies", "--trace", (support::data_dir() / "golden" / "scripted_c3_run0.jsonl").string()});
  EXPECT_NE(all.out.find("node 0 "), std::string::npos);
  EXPECT_NE(all.out.find("node 2 "), std::string::npos);
}

TEST(Cli, DistillRequiresInject) {
  const auto r = cli({"distill", "--config", (support::data_dir() / "fixtures" / "scripted_c3.toml").string()});
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, DistillSeedsRoundZeroPrompts) {
  const auto dir = scratch("distill");
  const auto r = cli({"distill", "--config", (support::data_dir() / "fixtures" / "scripted_c3.toml").string(),
                      "--inject", (support::data_dir() / "fixtures" / "distilled_strategy.txt").string(),
                      "--log-prompts", "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const RunTrace trace = load_trace(dir / "C3_llm-scripted" / "run0.jsonl");
  const std::string seed = support::read_file(support::data_dir() / "fixtures" / "distilled_strategy.txt");
  for (const auto& d : trace.rounds[0].decisions) {
    ASSERT_TRUE(d.user_prompt.has_value());
    EXPECT_NE(d.user_prompt->find("### MY PRIVATE NOTES:\n" + seed.substr(0, seed.size() - 1) + "\n\n"),
              std::string::npos);
  }
  std::filesystem::remove_all(dir);
}
