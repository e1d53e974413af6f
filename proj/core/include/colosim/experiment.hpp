#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "colosim/attack.hpp"
#include "colosim/cluster.hpp"
#include "colosim/migration.hpp"
#include "colosim/scheduler.hpp"
#include "colosim/workload.hpp"

namespace colosim {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int slots = 1000;
  int apps_per_slot = 10;
  // Victims spread evenly over the run; each one triggers one attack.
  int victim_count = 4000;
  // A rejected spec is retried in up to this many later slots, then dropped.
  int retry_limit = 3;
  ClusterGenConfig cluster;
  WorkloadConfig workload;
  AttackConfig attack;
  SchedulerConfig scheduler;
  std::optional<MigrationConfig> migration;
  bool collect_audit = false;
  // Run the cluster audit walk after every slot instead of only at the end.
  bool check_invariants = false;
};

void validate(const ExperimentConfig& config);

namespace audit {

struct Decision {
  int slot = 0;
  Role role = Role::normal;
  std::optional<std::size_t> attack;  // attack index for attack instances
  ScheduleDecision decision;
};

struct Migration {
  int slot = 0;
  MigrationEvent event;
};

struct Overlap {
  int slot = 0;
  InstanceId victim;
  bool colocated = false;
};

struct Attack {
  std::size_t index = 0;
  InstanceId victim;
  std::vector<InstanceId> instances;
  bool success = false;
};

}  // namespace audit

using AuditRecord = std::variant<audit::Decision, audit::Migration, audit::Overlap, audit::Attack>;

nlohmann::json to_json(const AuditRecord& record);
AuditRecord audit_record_from_json(const nlohmann::json& j);

struct ExperimentResult {
  std::optional<double> colocation_rate;  // nullopt when no attacks completed
  std::optional<double> affinity_satisfaction;
  std::optional<double> mean_violated_specs;
  long attacks_total = 0;
  long attacks_successful = 0;
  long decisions = 0;
  long rejections = 0;
  long placements = 0;
  long dropped = 0;
  long migrations = 0;
  double rejection_rate = 0.0;
  std::vector<AuditRecord> audit;  // only with collect_audit
};

nlohmann::json summary_json(const ExperimentResult& result);

struct AttackOutcome {
  InstanceId victim;
  bool success = false;
};

// successes / total; nullopt when there were no attacks.
std::optional<double> colocation_rate(std::span<const AttackOutcome> outcomes);

// Fraction of placed decisions whose node met every required rule.
std::optional<double> affinity_satisfaction(std::span<const ScheduleDecision> decisions);

// Mean required-rule violations over placed decisions.
std::optional<double> mean_violated_specs(std::span<const ScheduleDecision> decisions);

// Rebuilds every metric of an ExperimentResult from its audit log.
ExperimentResult recompute_from_audit(std::span<const AuditRecord> records);

ExperimentResult run(const ExperimentConfig& config);

}  // namespace colosim
