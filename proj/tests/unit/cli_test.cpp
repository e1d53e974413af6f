#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "colosim/cluster.hpp"
#include "colosim/manifest.hpp"
#include "colosim_cli/commands.hpp"

namespace colosim::cli {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("colosim_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    config_ = dir_ / "config.json";
    write(config_, R"({"seed": 4, "slots": 30, "apps_per_slot": 4, "victim_count": 20,
                      "cluster": {"node_count": 10},
                      "workload": {"lifetime_min": 5, "lifetime_max": 15},
                      "attack": {"k": 2}})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  static void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
  }
  static std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  fs::path config_;
  std::ostringstream err_;
};

TEST_F(CliTest, RunWritesThreeFiles) {
  RunOptions options{config_, std::nullopt, dir_ / "out"};
  ASSERT_EQ(cmd_run(options, err_), kExitOk) << err_.str();
  for (const char* name : {"summary.json", "results.csv", "audit.jsonl"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
  }
  const auto summary = nlohmann::json::parse(read(dir_ / "out" / "summary.json"));
  EXPECT_EQ(summary["seed"], 4);
  EXPECT_FALSE(read(dir_ / "out" / "audit.jsonl").empty());
}

TEST_F(CliTest, RunIsByteIdentical) {
  ASSERT_EQ(cmd_run({config_, std::nullopt, dir_ / "a"}, err_), kExitOk);
  ASSERT_EQ(cmd_run({config_, std::nullopt, dir_ / "b"}, err_), kExitOk);
  EXPECT_EQ(read(dir_ / "a" / "results.csv"), read(dir_ / "b" / "results.csv"));
  EXPECT_EQ(read(dir_ / "a" / "audit.jsonl"), read(dir_ / "b" / "audit.jsonl"));
  ASSERT_EQ(cmd_run({config_, 99, dir_ / "c"}, err_), kExitOk);
  EXPECT_NE(read(dir_ / "a" / "results.csv"), read(dir_ / "c" / "results.csv"));
}

TEST_F(CliTest, SeedPrecedence) {
  write(config_, R"({"slots": 5, "apps_per_slot": 2, "victim_count": 2, "cluster": {"node_count": 5}})");
  ::setenv("COLOSIM_SEED", "77", 1);
  ASSERT_EQ(cmd_run({config_, std::nullopt, dir_ / "env"}, err_), kExitOk);
  ASSERT_EQ(cmd_run({config_, 5, dir_ / "flag"}, err_), kExitOk);
  ::setenv("COLOSIM_SEED", "not-a-number", 1);
  EXPECT_EQ(cmd_run({config_, std::nullopt, dir_ / "bad"}, err_), kExitUsage);
  ::unsetenv("COLOSIM_SEED");
  EXPECT_EQ(nlohmann::json::parse(read(dir_ / "env" / "summary.json"))["seed"], 77);
  EXPECT_EQ(nlohmann::json::parse(read(dir_ / "flag" / "summary.json"))["seed"], 5);
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(cmd_run({dir_ / "missing.json", std::nullopt, dir_ / "o"}, err_), kExitUsage);
  write(config_, R"({"slots": 0})");
  EXPECT_EQ(cmd_run({config_, std::nullopt, dir_ / "o"}, err_), kExitUsage);
  write(config_, "{ nope");
  EXPECT_EQ(cmd_run({config_, std::nullopt, dir_ / "o"}, err_), kExitUsage);
  EXPECT_NE(err_.str().find("config error"), std::string::npos);
}

TEST_F(CliTest, SweepSerialMatchesParallel) {
  SweepOptions serial{config_, "attack.k=1..3;attack.spreading=true,false", 1, dir_ / "s"};
  SweepOptions parallel = serial;
  parallel.jobs = 3;
  parallel.out = dir_ / "p";
  ASSERT_EQ(cmd_sweep(serial, err_), kExitOk) << err_.str();
  ASSERT_EQ(cmd_sweep(parallel, err_), kExitOk) << err_.str();
  const auto csv = read(dir_ / "s" / "results.csv");
  EXPECT_EQ(csv, read(dir_ / "p" / "results.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_EQ(nlohmann::json::parse(read(dir_ / "s" / "summary.json")).size(), 6u);
  SweepOptions bad = serial;
  bad.grid = "attack.nope=1";
  EXPECT_EQ(cmd_sweep(bad, err_), kExitUsage);
}

TEST_F(CliTest, AttackGen) {
  const fs::path victim = fs::path(COLOSIM_FIXTURES_DIR) / "victim.yaml";
  AttackGenOptions options;
  options.victim = victim;
  options.k = 3;
  options.out = dir_ / "gen3";
  ASSERT_EQ(cmd_attack_gen(options, err_), kExitOk) << err_.str();
  for (int i = 1; i <= 3; ++i) {
    const auto text = read(dir_ / "gen3" / "manifests" / ("attack-" + std::to_string(i) + ".yaml"));
    EXPECT_NE(text.find("podAntiAffinity"), std::string::npos);
    EXPECT_NE(text.find("colosim.io/spread"), std::string::npos);
    LabelUniverse universe;
    const auto spec = parse_pod_manifest(text, universe);
    EXPECT_EQ(spec.role, Role::attack);
    EXPECT_EQ(spec.request, kMinimumRequest);
  }
  EXPECT_FALSE(fs::exists(dir_ / "gen3" / "manifests" / "attack-4.yaml"));

  options.k = 1;
  options.out = dir_ / "gen1";
  ASSERT_EQ(cmd_attack_gen(options, err_), kExitOk);
  const auto single = read(dir_ / "gen1" / "manifests" / "attack-1.yaml");
  EXPECT_EQ(single.find("podAntiAffinity"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "gen1" / "manifests" / "attack-2.yaml"));
}

TEST_F(CliTest, AttackGenRejectsBadInput) {
  write(dir_ / "bad.yaml", "apiVersion: v1\nkind: Pod\nspec:\n  containers: []\n");
  AttackGenOptions options;
  options.victim = dir_ / "bad.yaml";
  options.out = dir_ / "o";
  EXPECT_EQ(cmd_attack_gen(options, err_), kExitUsage);
  options.victim = fs::path(COLOSIM_FIXTURES_DIR) / "victim.yaml";
  options.k = 0;
  EXPECT_EQ(cmd_attack_gen(options, err_), kExitUsage);
}

}  // namespace
}  // namespace colosim::cli
