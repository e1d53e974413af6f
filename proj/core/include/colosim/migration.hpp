#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "colosim/cluster.hpp"
#include "colosim/rng.hpp"
#include "colosim/workload.hpp"

namespace colosim {

enum class MigrationDestination { shortlist, cluster_wide };

struct MigrationConfig {
  double probability = 0.0;  // p_mi, per instance per slot
  MigrationDestination destination = MigrationDestination::shortlist;
  double success_threshold = 80.0;  // percent of victim lifetime
  bool allow_self_migration = true;
};

void validate(const MigrationConfig& config);

struct MigrationEvent {
  InstanceId instance;
  NodeId from;
  NodeId to;
};

/// Examines `placed` in order; each instance draws one selection coin. A
/// selected instance is released and re-placed on a uniformly chosen
/// destination: the unmitigated filter output for its spec (shortlist) or any
/// node with enough free capacity (cluster-wide). With no destination it
/// stays put. Released capacity is visible to later instances in the same
/// call. Returns the moves made, self-moves included.
std::vector<MigrationEvent> migrate_step(ClusterState& cluster,
                                         std::span<const AppSpec* const> placed,
                                         const MigrationConfig& config, Rng& rng);

struct OverlapEntry {
  long slots_alive = 0;
  long slots_colocated = 0;

  std::optional<double> ratio() const;
};

class OverlapLedger {
 public:
  // One call per slot while the victim is alive.
  void record(InstanceId victim, std::span<const InstanceId> attack_ids,
              const ClusterState& cluster);
  const OverlapEntry* entry(InstanceId victim) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<InstanceId, OverlapEntry> entries_;
};

// True iff colocated / alive > threshold / 100. nullopt for zero lifetime.
std::optional<bool> lifetime_success(const OverlapEntry& entry, double threshold_percent);

}  // namespace colosim
