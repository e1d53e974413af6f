#include "colosim/attack.hpp"

#include "colosim/errors.hpp"

namespace colosim {

void validate(const AttackConfig& config) {
  if (config.instance_count < 1) throw ConfigError("attack.k must be >= 1");
  if (!(config.replication_noise >= 0.0 && config.replication_noise <= 1.0)) {
    throw ConfigError("attack.noise must be in [0, 1]");
  }
  if (config.delay_slots < 0) throw ConfigError("attack.delay_slots must be >= 0");
  if (config.lifetime_slots < 0) throw ConfigError("attack.lifetime_slots must be >= 0");
}

std::vector<AppSpec> repttack_specs(const AppSpec& victim, const AttackConfig& config,
                                    const SpreadingLabel& spreading, Rng& rng) {
  const bool spread = config.use_spreading_label && config.instance_count > 1;
  std::vector<AppSpec> out;
  out.reserve(static_cast<std::size_t>(config.instance_count));
  for (int i = 0; i < config.instance_count; ++i) {
    AppSpec spec;
    spec.role = Role::attack;
    spec.request = kMinimumRequest;
    spec.submit_slot = victim.submit_slot;
    spec.lifetime_slots = config.lifetime_slots;
    spec.own_labels.set(spreading.key, spreading.value);
    for (const auto& rule : victim.rules) {
      // One coin per rule even at zero noise keeps the stream aligned.
      if (bernoulli(rng, config.replication_noise)) continue;
      spec.rules.push_back(rule);
    }
    if (spread) {
      spec.rules.push_back(AffinityRule{RuleKind::inter_app, Polarity::anti_affinity,
                                        Strength::required, spreading.key, spreading.value});
    }
    out.push_back(std::move(spec));
  }
  return out;
}

std::optional<bool> is_colocated(InstanceId victim, std::span<const InstanceId> attack_ids,
                                 const ClusterState& cluster) {
  const auto victim_node = cluster.location(victim);
  if (!victim_node) return std::nullopt;
  for (InstanceId id : attack_ids) {
    if (cluster.location(id) == victim_node) return true;
  }
  return false;
}

}  // namespace colosim
