#include "colosim/migration.hpp"

#include <fmt/format.h>

#include "colosim/attack.hpp"
#include "colosim/errors.hpp"
#include "colosim/scheduler.hpp"

namespace colosim {

void validate(const MigrationConfig& config) {
  if (!(config.probability >= 0.0 && config.probability <= 1.0)) {
    throw ConfigError("migration.p_mi must be in [0, 1]");
  }
  if (!(config.success_threshold > 0.0 && config.success_threshold <= 100.0)) {
    throw ConfigError("migration.threshold must be in (0, 100]");
  }
}

std::vector<MigrationEvent> migrate_step(ClusterState& cluster,
                                         std::span<const AppSpec* const> placed,
                                         const MigrationConfig& config, Rng& rng) {
  std::vector<MigrationEvent> events;
  for (const AppSpec* spec : placed) {
    const bool selected = bernoulli(rng, config.probability);
    if (!selected) continue;
    const auto source = cluster.location(spec->id);
    if (!source) continue;

    cluster.release(*source, spec->id);
    std::vector<NodeId> destinations;
    if (config.destination == MigrationDestination::shortlist) {
      destinations = filter(*spec, cluster);
    } else {
      for (const Node& node : cluster.nodes()) {
        if (spec->request.fits_in(node.free())) destinations.push_back(node.id);
      }
    }
    if (!config.allow_self_migration) std::erase(destinations, *source);

    NodeId target = *source;
    if (!destinations.empty()) target = destinations[uniform_index(rng, destinations.size())];
    cluster.allocate(target, spec->id, spec->request, spec->own_labels);
    if (!destinations.empty()) events.push_back({spec->id, *source, target});
  }
  return events;
}

std::optional<double> OverlapEntry::ratio() const {
  if (slots_alive <= 0) return std::nullopt;
  return static_cast<double>(slots_colocated) / static_cast<double>(slots_alive);
}

void OverlapLedger::record(InstanceId victim, std::span<const InstanceId> attack_ids,
                           const ClusterState& cluster) {
  auto& entry = entries_[victim];
  ++entry.slots_alive;
  if (is_colocated(victim, attack_ids, cluster).value_or(false)) ++entry.slots_colocated;
}

const OverlapEntry* OverlapLedger::entry(InstanceId victim) const {
  auto it = entries_.find(victim);
  return it == entries_.end() ? nullptr : &it->second;
}

std::optional<bool> lifetime_success(const OverlapEntry& entry, double threshold_percent) {
  if (entry.slots_alive <= 0) return std::nullopt;
  // Cross-multiplied so that 80 of 100 slots at t=80 compares exactly.
  return static_cast<double>(entry.slots_colocated) * 100.0 >
         threshold_percent * static_cast<double>(entry.slots_alive);
}

}  // namespace colosim
