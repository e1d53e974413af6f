#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "colosim/cluster.hpp"
#include "colosim/labels.hpp"
#include "colosim/resources.hpp"
#include "colosim/rng.hpp"

namespace colosim {

enum class RuleKind { node, inter_app };
enum class Polarity { affinity, anti_affinity };
enum class Strength { required, preferred };

/// One placement constraint of the form label=value.
struct AffinityRule {
  RuleKind kind = RuleKind::node;
  Polarity polarity = Polarity::affinity;
  Strength strength = Strength::required;
  LabelKey key = 0;
  LabelValue value = 0;

  bool required() const { return strength == Strength::required; }
  friend bool operator==(const AffinityRule&, const AffinityRule&) = default;
};

enum class Role { normal, victim, attack };

std::string_view to_string(Role role);
std::optional<Role> parse_role(std::string_view text);

struct AppSpec {
  InstanceId id;
  ResourceVector request = kMinimumRequest;
  LabelMap own_labels;
  std::vector<AffinityRule> rules;
  Role role = Role::normal;
  int submit_slot = 0;
  int lifetime_slots = 0;

  friend bool operator==(const AppSpec&, const AppSpec&) = default;
};

/// Rule counts per category, written as four digits: required node,
/// preferred node, required inter-app, preferred inter-app ("2131").
struct AffinityPattern {
  int req_node = 0;
  int pref_node = 0;
  int req_app = 0;
  int pref_app = 0;

  static AffinityPattern parse(std::string_view digits);
  std::string str() const;
  friend bool operator==(const AffinityPattern&, const AffinityPattern&) = default;
};

struct WorkloadConfig {
  double p_m = 0.5;   // own app-label presence
  double p_mn = 0.5;  // node-affinity rule presence per node key
  double p_ma = 0.5;  // inter-app rule presence per app key
  std::optional<AffinityPattern> pattern;
  ResourceVector max_request{8, 16, 16, 4};
  double affinity_ratio = 0.7;  // P(affinity) vs anti-affinity
  double required_ratio = 0.5;  // P(required) vs preferred, probability mode only
  int lifetime_min = 50;
  int lifetime_max = 200;
};

void validate(const WorkloadConfig& config);

// Probability mode: one independent coin per label key and category.
AppSpec generate_app_spec(const WorkloadConfig& config, const LabelUniverse& universe,
                          Rng& rng, InstanceId id, int submit_slot = 0);

// Exact rule counts per category; keys sampled without replacement. Throws
// ConfigError when a count exceeds the available keys of that kind.
AppSpec generate_app_spec_patterned(const AffinityPattern& pattern,
                                    const WorkloadConfig& config,
                                    const LabelUniverse& universe, Rng& rng,
                                    InstanceId id, int submit_slot = 0);

// Uniform sample without replacement, in draw order. Throws SamplingError
// when count exceeds the population.
std::vector<InstanceId> victim_sample(std::span<const InstanceId> population,
                                      std::size_t count, Rng& rng);

}  // namespace colosim
