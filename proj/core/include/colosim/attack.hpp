#pragma once

#include <optional>
#include <span>
#include <vector>

#include "colosim/cluster.hpp"
#include "colosim/labels.hpp"
#include "colosim/rng.hpp"
#include "colosim/workload.hpp"

namespace colosim {

struct AttackConfig {
  int instance_count = 1;  // k
  bool use_spreading_label = true;
  double replication_noise = 0.0;
  // Slots between victim placement and attack submission; 0 = same slot.
  int delay_slots = 1;
  // Attack instance lifetime; 0 keeps instances alive as long as the victim.
  int lifetime_slots = 1;
};

void validate(const AttackConfig& config);

/// The attacker-private label pair (kappa, nu) for one attack.
struct SpreadingLabel {
  LabelKey key = 0;
  LabelValue value = 0;
};

/// Builds the k attack specs for one victim: every victim affinity rule is
/// copied (each dropped with probability replication_noise), the request is
/// the minimum vector and own labels hold only the spreading pair. With
/// spreading enabled and k > 1 a required inter-app anti-affinity rule on the
/// spreading pair is appended. Returned specs carry id 0; callers assign ids.
std::vector<AppSpec> repttack_specs(const AppSpec& victim, const AttackConfig& config,
                                    const SpreadingLabel& spreading, Rng& rng);

// nullopt when the victim is not placed.
std::optional<bool> is_colocated(InstanceId victim, std::span<const InstanceId> attack_ids,
                                 const ClusterState& cluster);

}  // namespace colosim
