#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "colosim/cluster.hpp"
#include "colosim/rng.hpp"
#include "colosim/workload.hpp"

namespace colosim {

struct SchedulerConfig {
  double skip_probability = 0.0;  // p_s
  double preferred_match_weight = 1.0;
  double preferred_anti_match_penalty = 1.0;
  double resource_score_weight = 1.0;
  // Label keys whose required checks may be skipped; nullopt means all.
  std::optional<std::vector<std::string>> skippable_labels;
};

void validate(const SchedulerConfig& config);

struct ScheduleDecision {
  InstanceId instance;
  std::optional<NodeId> node;  // nullopt when rejected
  std::size_t candidate_count = 0;
  double score = 0.0;
  std::size_t skipped_checks = 0;
  // Required rules the chosen node violates, evaluated without skipping on
  // the state the filter saw.
  std::size_t violated_required = 0;

  bool placed() const { return node.has_value(); }
};

bool rule_satisfied(const AffinityRule& rule, const Node& node);

// Count of required rules violated on `node`. Resources are not considered.
std::size_t count_required_violations(const AppSpec& spec, const Node& node);

// The unmitigated filter predicate for one node.
bool node_passes(const AppSpec& spec, const Node& node);

std::vector<NodeId> filter(const AppSpec& spec, const ClusterState& cluster);

bool skip(double p_s, Rng& rng);

struct FilterOutcome {
  std::vector<NodeId> nodes;
  std::size_t skipped_checks = 0;
};

// Each (node, required rule) check on a skippable key draws one skip coin,
// in node order then rule order. Resource checks are never skipped.
FilterOutcome filter_mitigated_detail(const AppSpec& spec, const ClusterState& cluster,
                                      const SchedulerConfig& config, Rng& rng);
std::vector<NodeId> filter_mitigated(const AppSpec& spec, const ClusterState& cluster,
                                     const SchedulerConfig& config, Rng& rng);

double node_score(const AppSpec& spec, const Node& node, const SchedulerConfig& config);

// Argmax of node_score with uniform tie-breaking. Throws std::invalid_argument
// on empty candidates.
NodeId score(const AppSpec& spec, const std::vector<NodeId>& candidates,
             const ClusterState& cluster, const SchedulerConfig& config, Rng& rng);

// Filter (mitigated when p_s > 0), score, allocate.
ScheduleDecision schedule(const AppSpec& spec, ClusterState& cluster,
                          const SchedulerConfig& config, Rng& rng);

}  // namespace colosim
