#if VFTS_HAVE_CLI

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace fs = std::filesystem;
using vfts::cli::run_subcommand;

namespace {

struct Run {
  int status = 0;
  std::string out;
  std::string err;
};

Run run(const std::string& name, const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Run r;
  r.status = run_subcommand(name, args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("vfts_cli_" + name);
  fs::remove_all(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UnknownSubcommand) {
  const auto r = run("frobnicate", {});
  EXPECT_EQ(r.status, 2);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j.at("error"), "unknown_subcommand");
  EXPECT_EQ(j.at("stage"), "cli");
}

TEST(Cli, UnknownFlagLeavesNoOutputs) {
  const auto dir = fresh_dir("badflag");
  const auto r = run("pipeline", {"--no-such-flag", "3", "-o", dir.string()});
  EXPECT_NE(r.status, 0);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "config_error");
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, BadConfigValue) {
  const auto dir = fresh_dir("badvalue");
  const auto r = run("synth", {"--threshold", "2", "-o", dir.string()});
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(nlohmann::json::parse(r.err).at("error"), "config_error");
}

TEST(Cli, StageErrorNamesStage) {
  const auto dir = fresh_dir("stageerr");
  const auto r = run("smooth", {"-o", dir.string()});
  EXPECT_EQ(r.status, 1);
  const auto j = nlohmann::json::parse(r.err);
  EXPECT_EQ(j.at("stage"), "smooth");
  EXPECT_EQ(j.at("message").get<std::string>().rfind("smooth: ", 0), 0u);
}

TEST(Cli, PipelineOnSynthData) {
  const auto dir = fresh_dir("pipeline");
  const auto data = dir / "data";
  const auto out = dir / "out";
  ASSERT_EQ(run("synth", {"-o", data.string(), "--seed", "3", "--cycles", "120"}).status, 0);
  ASSERT_TRUE(fs::exists(data / "cycles_reset.csv"));
  ASSERT_TRUE(fs::exists(data / "ground_truth.json"));

  const std::string inputs = (data / "cycles_reset.csv").string() + "," + (data / "cycles_set.csv").string();
  const auto r = run("pipeline", {"-i", inputs, "-o", out.string(), "--p-max", "4"});
  ASSERT_EQ(r.status, 0) << r.err;
  for (const char* f : {"bundle_univariate.json", "bundle_multivariate.json", "causality_univariate.txt",
                        "causality_multivariate.json", "whiteness_univariate.csv", "forecast_univariate_reset.csv",
                        "forecast_multivariate_set.csv", "imse_summary.csv", "imse_boxplot.csv",
                        "fpca_table.txt", "outliers.json", "config_used.txt"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  EXPECT_NE(r.out.find("q at 95%:"), std::string::npos);
  EXPECT_NE(r.out.find("pipeline: done"), std::string::npos);
  const auto summary = slurp(out / "imse_summary.csv");
  EXPECT_EQ(summary.rfind("cycle,process,method,imse\n", 0), 0u);
  EXPECT_NE(summary.find(",mean,"), std::string::npos);
  EXPECT_NE(slurp(out / "config_used.txt").find("p_max = 4"), std::string::npos);
}

TEST(Cli, FpcaTableLayout) {
  const auto dir = fresh_dir("fpca");
  ASSERT_EQ(run("synth", {"-o", dir.string(), "--cycles", "80"}).status, 0);
  const std::string inputs = (dir / "cycles_reset.csv").string() + "," + (dir / "cycles_set.csv").string();
  for (const char* stage : {"ingest", "smooth", "screen"})
    ASSERT_EQ(run(stage, {"-i", inputs, "-o", dir.string()}).status, 0) << stage;
  const auto r = run("fpca", {"-o", dir.string(), "--threshold", "0.9"});
  ASSERT_EQ(r.status, 0) << r.err;
  std::istringstream lines(r.out);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  ASSERT_GE(all.size(), 9u);
  EXPECT_NE(all[1].find("reset"), std::string::npos);
  EXPECT_NE(all[1].find("multivariate"), std::string::npos);
  EXPECT_EQ(all[2].rfind("1 ", 0), 0u);
  EXPECT_EQ(all[8].rfind("q at 90%:", 0), 0u);
}

TEST(Cli, ConfigFileThenFlags) {
  const auto dir = fresh_dir("config");
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "cycles = 30\nseed = 9\noutput = " << (dir / "from_file").string() << "\n";
  }
  ASSERT_EQ(run("synth", {"-c", (dir / "run.cfg").string(), "--seed", "10"}).status, 0);
  const auto truth = nlohmann::json::parse(slurp(dir / "from_file" / "ground_truth.json"));
  EXPECT_EQ(truth.at("seed"), 10);
  EXPECT_EQ(truth.at("cycle_indices").size(), 30u);
}

TEST(Cli, HelpListsFlags) {
  const auto r = run("fit", {"--help"});
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("--variance-threshold"), std::string::npos);
  EXPECT_NE(r.out.find("--threshold"), std::string::npos);
}

#endif
