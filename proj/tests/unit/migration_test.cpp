#include <gtest/gtest.h>

#include <cmath>

#include "colosim/errors.hpp"
#include "colosim/migration.hpp"

namespace colosim {
namespace {

ClusterState pair_cluster() {
  LabelUniverse u;
  u.add_key("zone", LabelKind::node, {"a", "b"});
  std::vector<Node> nodes(2);
  for (std::uint32_t i = 0; i < 2; ++i) {
    nodes[i].id = NodeId{i};
    nodes[i].capacity = {4, 4, 4, 4};
    nodes[i].labels.set(0, i);
  }
  return ClusterState(std::move(u), std::move(nodes));
}

TEST(Migration, ZeroProbabilityNeverMoves) {
  auto cluster = pair_cluster();
  AppSpec spec;
  spec.id = InstanceId{1};
  cluster.allocate(NodeId{0}, spec.id, spec.request);
  const std::vector<const AppSpec*> placed{&spec};
  MigrationConfig config;
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_TRUE(migrate_step(cluster, placed, config, rng).empty());
  EXPECT_EQ(cluster.location(spec.id), NodeId{0});
}

TEST(Migration, ClusterWideDestinationIsUniform) {
  auto cluster = pair_cluster();
  AppSpec spec;
  spec.id = InstanceId{1};
  cluster.allocate(NodeId{0}, spec.id, spec.request);
  const std::vector<const AppSpec*> placed{&spec};
  MigrationConfig config;
  config.probability = 1.0;
  config.destination = MigrationDestination::cluster_wide;
  Rng rng(8);
  const int trials = 20000;
  int on_one = 0;
  for (int i = 0; i < trials; ++i) {
    const auto events = migrate_step(cluster, placed, config, rng);
    ASSERT_EQ(events.size(), 1u);
    on_one += *cluster.location(spec.id) == NodeId{1} ? 1 : 0;
  }
  const double rate = static_cast<double>(on_one) / trials;
  EXPECT_NEAR(rate, 0.5, 3 * std::sqrt(0.25 / trials));
}

TEST(Migration, SelfMigrationCanBeDisabled) {
  auto cluster = pair_cluster();
  AppSpec spec;
  spec.id = InstanceId{1};
  cluster.allocate(NodeId{0}, spec.id, spec.request);
  const std::vector<const AppSpec*> placed{&spec};
  MigrationConfig config;
  config.probability = 1.0;
  config.destination = MigrationDestination::cluster_wide;
  config.allow_self_migration = false;
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const auto before = *cluster.location(spec.id);
    const auto events = migrate_step(cluster, placed, config, rng);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_NE(events[0].to, before);
  }
}

TEST(Migration, SingletonShortlistIsDeterministic) {
  auto cluster = pair_cluster();
  AppSpec spec;
  spec.id = InstanceId{1};
  spec.rules = {AffinityRule{RuleKind::node, Polarity::affinity, Strength::required, 0, 1}};
  cluster.allocate(NodeId{0}, spec.id, spec.request);
  const std::vector<const AppSpec*> placed{&spec};
  MigrationConfig config;
  config.probability = 1.0;
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto events = migrate_step(cluster, placed, config, rng);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].to, NodeId{1});
  }
}

TEST(Migration, NoDestinationStaysPut) {
  auto cluster = pair_cluster();
  AppSpec spec;
  spec.id = InstanceId{1};
  spec.rules = {AffinityRule{RuleKind::node, Polarity::affinity, Strength::required, 0, 1}};
  cluster.allocate(NodeId{0}, spec.id, spec.request);
  cluster.allocate(NodeId{1}, InstanceId{2}, {4, 4, 4, 4});
  const std::vector<const AppSpec*> placed{&spec};
  MigrationConfig config;
  config.probability = 1.0;
  Rng rng(4);
  EXPECT_TRUE(migrate_step(cluster, placed, config, rng).empty());
  EXPECT_EQ(cluster.location(spec.id), NodeId{0});
}

TEST(Migration, ConservesInstancesAndResources) {
  auto cluster = generate_cluster(ClusterGenConfig{}, 12);
  const auto universe = cluster.universe();
  WorkloadConfig workload;
  Rng rng(12);
  std::vector<AppSpec> specs;
  for (std::uint64_t i = 1; i <= 400; ++i) {
    specs.push_back(generate_app_spec(workload, universe, rng, InstanceId{i}));
  }
  std::vector<const AppSpec*> placed;
  for (const auto& s : specs) {
    for (const Node& n : cluster.nodes()) {
      if (s.request.fits_in(n.free())) {
        cluster.allocate(n.id, s.id, s.request, s.own_labels);
        placed.push_back(&s);
        break;
      }
    }
  }
  ResourceVector before;
  for (const Node& n : cluster.nodes()) before += n.allocated;
  for (auto dest : {MigrationDestination::shortlist, MigrationDestination::cluster_wide}) {
    MigrationConfig config;
    config.probability = 0.5;
    config.destination = dest;
    for (int step = 0; step < 10; ++step) migrate_step(cluster, placed, config, rng);
    ResourceVector after;
    for (const Node& n : cluster.nodes()) after += n.allocated;
    EXPECT_EQ(after, before);
    EXPECT_EQ(cluster.instance_count(), placed.size());
    EXPECT_NO_THROW(cluster.audit());
  }
}

TEST(Migration, LifetimeSuccessBoundaries) {
  EXPECT_FALSE(lifetime_success(OverlapEntry{0, 0}, 80).has_value());
  EXPECT_EQ(lifetime_success(OverlapEntry{100, 80}, 80), false);
  EXPECT_EQ(lifetime_success(OverlapEntry{100, 81}, 80), true);
  EXPECT_EQ(lifetime_success(OverlapEntry{5, 4}, 80), false);
  EXPECT_EQ(lifetime_success(OverlapEntry{5, 5}, 80), true);
  EXPECT_EQ(lifetime_success(OverlapEntry{5, 5}, 100), false);
  EXPECT_EQ(lifetime_success(OverlapEntry{3, 0}, 0.001), false);
  EXPECT_EQ((OverlapEntry{4, 1}.ratio()), 0.25);
  EXPECT_FALSE(OverlapEntry{}.ratio().has_value());
}

TEST(Migration, OverlapLedgerCounts) {
  auto cluster = pair_cluster();
  cluster.allocate(NodeId{0}, InstanceId{1}, kMinimumRequest);
  cluster.allocate(NodeId{1}, InstanceId{2}, kMinimumRequest);
  const std::vector<InstanceId> attacks{InstanceId{2}};
  OverlapLedger ledger;
  ledger.record(InstanceId{1}, attacks, cluster);
  cluster.release(InstanceId{2});
  cluster.allocate(NodeId{0}, InstanceId{2}, kMinimumRequest);
  ledger.record(InstanceId{1}, attacks, cluster);
  ledger.record(InstanceId{1}, attacks, cluster);
  ASSERT_NE(ledger.entry(InstanceId{1}), nullptr);
  EXPECT_EQ(ledger.entry(InstanceId{1})->slots_alive, 3);
  EXPECT_EQ(ledger.entry(InstanceId{1})->slots_colocated, 2);
  EXPECT_EQ(ledger.entry(InstanceId{9}), nullptr);
}

TEST(Migration, ValidateRejectsBadConfig) {
  MigrationConfig c;
  c.probability = -0.5;
  EXPECT_THROW(validate(c), ConfigError);
  c = {};
  c.success_threshold = 0;
  EXPECT_THROW(validate(c), ConfigError);
  c.success_threshold = 101;
  EXPECT_THROW(validate(c), ConfigError);
}

}  // namespace
}  // namespace colosim
