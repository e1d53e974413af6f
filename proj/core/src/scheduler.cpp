#include "colosim/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "colosim/errors.hpp"

namespace colosim {

void validate(const SchedulerConfig& config) {
  if (!(config.skip_probability >= 0.0 && config.skip_probability <= 1.0)) {
    throw ConfigError("scheduler.p_s must be in [0, 1]");
  }
  if (config.preferred_match_weight < 0 || config.preferred_anti_match_penalty < 0 ||
      config.resource_score_weight < 0) {
    throw ConfigError("scheduler weights must be non-negative");
  }
}

bool rule_satisfied(const AffinityRule& rule, const Node& node) {
  const bool present = rule.kind == RuleKind::node ? node.labels.has(rule.key, rule.value)
                                                   : node.hosts_label(rule.key, rule.value);
  return rule.polarity == Polarity::affinity ? present : !present;
}

std::size_t count_required_violations(const AppSpec& spec, const Node& node) {
  std::size_t violations = 0;
  for (const auto& rule : spec.rules) {
    if (rule.required() && !rule_satisfied(rule, node)) ++violations;
  }
  return violations;
}

bool node_passes(const AppSpec& spec, const Node& node) {
  if (!spec.request.fits_in(node.free())) return false;
  return std::all_of(spec.rules.begin(), spec.rules.end(), [&node](const AffinityRule& rule) {
    return !rule.required() || rule_satisfied(rule, node);
  });
}

std::vector<NodeId> filter(const AppSpec& spec, const ClusterState& cluster) {
  std::vector<NodeId> out;
  for (const Node& node : cluster.nodes()) {
    if (node_passes(spec, node)) out.push_back(node.id);
  }
  return out;
}

bool skip(double p_s, Rng& rng) { return bernoulli(rng, p_s); }

namespace {

std::vector<char> skippable_keys(const SchedulerConfig& config, const LabelUniverse& universe) {
  std::vector<char> mask(universe.key_count(), config.skippable_labels ? 0 : 1);
  if (config.skippable_labels) {
    for (const auto& name : *config.skippable_labels) {
      if (auto key = universe.find_key(name)) mask[*key] = 1;
    }
  }
  return mask;
}

}  // namespace

FilterOutcome filter_mitigated_detail(const AppSpec& spec, const ClusterState& cluster,
                                      const SchedulerConfig& config, Rng& rng) {
  const auto mask = skippable_keys(config, cluster.universe());
  FilterOutcome out;
  for (const Node& node : cluster.nodes()) {
    bool keep = spec.request.fits_in(node.free());
    for (const auto& rule : spec.rules) {
      if (!rule.required()) continue;
      if (rule.key < mask.size() && mask[rule.key] && skip(config.skip_probability, rng)) {
        ++out.skipped_checks;
        continue;
      }
      if (!rule_satisfied(rule, node)) keep = false;
    }
    if (keep) out.nodes.push_back(node.id);
  }
  return out;
}

std::vector<NodeId> filter_mitigated(const AppSpec& spec, const ClusterState& cluster,
                                     const SchedulerConfig& config, Rng& rng) {
  return filter_mitigated_detail(spec, cluster, config, rng).nodes;
}

double node_score(const AppSpec& spec, const Node& node, const SchedulerConfig& config) {
  const auto free = node.free().as_array();
  const auto cap = node.capacity.as_array();
  const auto req = spec.request.as_array();
  double least_requested = 0.0;
  for (std::size_t d = 0; d < ResourceVector::kDimensions; ++d) {
    if (cap[d] > 0) least_requested += static_cast<double>(free[d] - req[d]) / static_cast<double>(cap[d]);
  }
  least_requested /= static_cast<double>(ResourceVector::kDimensions);

  double preference = 0.0;
  for (const auto& rule : spec.rules) {
    if (rule.required()) continue;
    if (rule_satisfied(rule, node)) {
      preference += config.preferred_match_weight;
    } else if (rule.polarity == Polarity::anti_affinity) {
      preference -= config.preferred_anti_match_penalty;
    }
  }
  return config.resource_score_weight * least_requested + preference;
}

NodeId score(const AppSpec& spec, const std::vector<NodeId>& candidates,
             const ClusterState& cluster, const SchedulerConfig& config, Rng& rng) {
  if (candidates.empty()) throw std::invalid_argument("score: no candidates");
  if (candidates.size() == 1) return candidates.front();

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (NodeId id : candidates) scores.push_back(node_score(spec, cluster.node(id), config));
  const double best = *std::max_element(scores.begin(), scores.end());
  // Relative tolerance so that rescaling every weight keeps the tie set.
  const double tolerance = 1e-9 * std::max(1.0, std::abs(best));
  std::vector<NodeId> tied;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (best - scores[i] <= tolerance) tied.push_back(candidates[i]);
  }
  return tied.size() == 1 ? tied.front() : tied[uniform_index(rng, tied.size())];
}

ScheduleDecision schedule(const AppSpec& spec, ClusterState& cluster,
                          const SchedulerConfig& config, Rng& rng) {
  ScheduleDecision decision;
  decision.instance = spec.id;
  FilterOutcome filtered;
  if (config.skip_probability > 0.0) {
    filtered = filter_mitigated_detail(spec, cluster, config, rng);
  } else {
    filtered.nodes = filter(spec, cluster);
  }
  decision.candidate_count = filtered.nodes.size();
  decision.skipped_checks = filtered.skipped_checks;
  if (filtered.nodes.empty()) return decision;

  const NodeId chosen = score(spec, filtered.nodes, cluster, config, rng);
  const Node& node = cluster.node(chosen);
  decision.score = node_score(spec, node, config);
  decision.violated_required = count_required_violations(spec, node);
  cluster.allocate(chosen, spec.id, spec.request, spec.own_labels);
  decision.node = chosen;
  return decision;
}

}  // namespace colosim
