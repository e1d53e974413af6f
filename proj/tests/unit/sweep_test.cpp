#include <gtest/gtest.h>

#include <algorithm>

#include "colosim/errors.hpp"
#include "colosim/sweep.hpp"

namespace colosim {
namespace {

using nlohmann::json;

json small_base() {
  return json::parse(R"({
    "seed": 3, "slots": 40, "apps_per_slot": 4, "victim_count": 40,
    "cluster": {"node_count": 12},
    "workload": {"lifetime_min": 5, "lifetime_max": 20}
  })");
}

TEST(Grid, ParsesRangesListsAndScalars) {
  const auto grid = parse_grid(" attack.k=1..3 ; attack.spreading=true,false;scheduler.p_s=0.05, 0.1");
  ASSERT_EQ(grid.size(), 3u);
  EXPECT_EQ(grid[0].path, "attack.k");
  EXPECT_EQ(grid[0].values, (std::vector<json>{1, 2, 3}));
  EXPECT_EQ(grid[1].values, (std::vector<json>{true, false}));
  EXPECT_EQ(grid[2].values, (std::vector<json>{0.05, 0.1}));
  EXPECT_EQ(parse_grid("migration.destination=cluster-wide")[0].values[0], "cluster-wide");
}

TEST(Grid, EmptyTextIsEmptyGrid) {
  EXPECT_TRUE(parse_grid("").empty());
  EXPECT_TRUE(parse_grid("   ").empty());
}

TEST(Grid, Rejections) {
  for (const char* bad : {"attack.k", "=1", "attack.k=", "attack.k=3..1", "attack.k=1..x",
                          "attack.k=1;attack.k=2", "attack.k=1,,2"}) {
    EXPECT_THROW(parse_grid(bad), ConfigError) << bad;
  }
}

TEST(Sweep, EmptyGridIsSingleRun) {
  const auto points = sweep(small_base(), {});
  ASSERT_EQ(points.size(), 1u);
  EXPECT_EQ(points[0].seed, derive_seed(3, 0));
  EXPECT_TRUE(points[0].params.empty());
}

TEST(Sweep, FirstAxisVariesSlowest) {
  const auto grid = parse_grid("attack.k=1..10;attack.spreading=true,false");
  const auto points = sweep(small_base(), grid);
  ASSERT_EQ(points.size(), 20u);
  for (std::size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(points[i].index, i);
    EXPECT_EQ(points[i].params[0].second, static_cast<int>(i / 2 + 1));
    EXPECT_EQ(points[i].params[1].second, i % 2 == 0);
    EXPECT_EQ(points[i].seed, derive_seed(3, i));
  }
  const auto csv = results_csv(grid, points);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "point,attack.k,attack.spreading,seed,colocation_rate,affinity_satisfaction,"
            "mean_violated_specs,rejection_rate,attacks_total,attacks_successful");
}

TEST(Sweep, SeedAxisUsedVerbatim) {
  const auto points = sweep(small_base(), parse_grid("seed=11,12"));
  EXPECT_EQ(points[0].seed, 11u);
  EXPECT_EQ(points[1].seed, 12u);
}

TEST(Sweep, UnknownPathThrowsBeforeRunning) {
  EXPECT_THROW(sweep(small_base(), parse_grid("attack.kk=1")), ConfigError);
  EXPECT_THROW(sweep(small_base(), parse_grid("attack..k=1")), ConfigError);
  EXPECT_THROW(sweep(small_base(), parse_grid("attack.k=0,1")), ConfigError);
}

TEST(Sweep, MigrationAxisEnablesMigration) {
  const auto points = sweep(small_base(), parse_grid("migration.p_mi=0,0.5"));
  EXPECT_EQ(points[0].result.migrations, 0);
  EXPECT_GT(points[1].result.migrations, 0);
}

TEST(Sweep, ParallelMatchesSerial) {
  const auto grid = parse_grid("attack.k=1..4;scheduler.p_s=0,0.1");
  const auto serial = results_csv(grid, sweep(small_base(), grid, 1));
  EXPECT_EQ(results_csv(grid, sweep(small_base(), grid, 4)), serial);
  EXPECT_EQ(results_csv(grid, sweep(small_base(), grid, 1)), serial);
}

TEST(Sweep, MissingMetricsPrintAsNA) {
  auto base = small_base();
  base["victim_count"] = 0;
  const auto csv = results_csv({}, sweep(base, {}));
  EXPECT_NE(csv.find(",NA,"), std::string::npos);
}

}  // namespace
}  // namespace colosim
