#include "colosim/workload.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "colosim/errors.hpp"

namespace colosim {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::normal: return "normal";
    case Role::victim: return "victim";
    case Role::attack: return "attack";
  }
  return "unknown";
}

std::optional<Role> parse_role(std::string_view text) {
  if (text == "normal") return Role::normal;
  if (text == "victim") return Role::victim;
  if (text == "attack") return Role::attack;
  return std::nullopt;
}

AffinityPattern AffinityPattern::parse(std::string_view digits) {
  if (digits.size() != 4 ||
      !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw ConfigError(fmt::format("affinity pattern must be four digits, got '{}'", digits));
  }
  return {digits[0] - '0', digits[1] - '0', digits[2] - '0', digits[3] - '0'};
}

std::string AffinityPattern::str() const {
  return fmt::format("{}{}{}{}", req_node, pref_node, req_app, pref_app);
}

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

ResourceVector draw_request(const ResourceVector& max, Rng& rng) {
  return {uniform_int(rng, 1, max.cpu_cores), uniform_int(rng, 1, max.memory),
          uniform_int(rng, 1, max.disk), uniform_int(rng, 1, max.network_ports)};
}

LabelValue draw_value(const LabelUniverse& universe, LabelKey key, Rng& rng) {
  return static_cast<LabelValue>(uniform_index(rng, universe.domain_size(key)));
}

Polarity draw_polarity(double affinity_ratio, Rng& rng) {
  return bernoulli(rng, affinity_ratio) ? Polarity::affinity : Polarity::anti_affinity;
}

// Draws in a fixed order: request, own labels, rules; then lifetime.
AppSpec start_spec(const WorkloadConfig& config, const LabelUniverse& universe, Rng& rng,
                   InstanceId id, int submit_slot) {
  AppSpec spec;
  spec.id = id;
  spec.role = Role::normal;
  spec.submit_slot = submit_slot;
  spec.request = draw_request(config.max_request, rng);
  for (LabelKey key : universe.keys_of(LabelKind::app)) {
    if (bernoulli(rng, config.p_m)) spec.own_labels.set(key, draw_value(universe, key, rng));
  }
  return spec;
}

void finish_spec(AppSpec& spec, const WorkloadConfig& config, Rng& rng) {
  spec.lifetime_slots = static_cast<int>(uniform_int(rng, config.lifetime_min, config.lifetime_max));
}

}  // namespace

void validate(const WorkloadConfig& config) {
  for (auto [name, p] : {std::pair{"p_m", config.p_m}, std::pair{"p_mn", config.p_mn},
                         std::pair{"p_ma", config.p_ma},
                         std::pair{"affinity_ratio", config.affinity_ratio},
                         std::pair{"required_ratio", config.required_ratio}}) {
    if (!is_probability(p)) throw ConfigError(fmt::format("workload.{} must be in [0, 1]", name));
  }
  if (!kMinimumRequest.fits_in(config.max_request)) {
    throw ConfigError("workload request maxima must all be >= 1");
  }
  if (config.lifetime_min < 1 || config.lifetime_max < config.lifetime_min) {
    throw ConfigError("workload lifetime bounds must satisfy 1 <= min <= max");
  }
  if (config.pattern) {
    const auto& p = *config.pattern;
    for (int c : {p.req_node, p.pref_node, p.req_app, p.pref_app}) {
      if (c < 0) throw ConfigError("affinity pattern counts must be non-negative");
    }
  }
}

AppSpec generate_app_spec(const WorkloadConfig& config, const LabelUniverse& universe, Rng& rng,
                          InstanceId id, int submit_slot) {
  AppSpec spec = start_spec(config, universe, rng, id, submit_slot);
  auto add_rules = [&](LabelKind label_kind, RuleKind rule_kind, double p) {
    for (LabelKey key : universe.keys_of(label_kind)) {
      if (!bernoulli(rng, p)) continue;
      AffinityRule rule;
      rule.kind = rule_kind;
      rule.key = key;
      rule.polarity = draw_polarity(config.affinity_ratio, rng);
      rule.strength = bernoulli(rng, config.required_ratio) ? Strength::required
                                                            : Strength::preferred;
      rule.value = draw_value(universe, key, rng);
      spec.rules.push_back(rule);
    }
  };
  add_rules(LabelKind::node, RuleKind::node, config.p_mn);
  add_rules(LabelKind::app, RuleKind::inter_app, config.p_ma);
  finish_spec(spec, config, rng);
  return spec;
}

AppSpec generate_app_spec_patterned(const AffinityPattern& pattern, const WorkloadConfig& config,
                                    const LabelUniverse& universe, Rng& rng, InstanceId id,
                                    int submit_slot) {
  const auto node_keys = universe.keys_of(LabelKind::node);
  const auto app_keys = universe.keys_of(LabelKind::app);
  auto check = [](int count, std::size_t available, const char* what) {
    if (count < 0 || static_cast<std::size_t>(count) > available) {
      throw ConfigError(fmt::format("pattern asks for {} {} rules but only {} keys exist", count,
                                    what, available));
    }
  };
  check(pattern.req_node, node_keys.size(), "required node");
  check(pattern.pref_node, node_keys.size(), "preferred node");
  check(pattern.req_app, app_keys.size(), "required inter-app");
  check(pattern.pref_app, app_keys.size(), "preferred inter-app");

  AppSpec spec = start_spec(config, universe, rng, id, submit_slot);
  auto add_rules = [&](const std::vector<LabelKey>& keys, int count, RuleKind kind,
                       Strength strength) {
    std::vector<LabelKey> pool = keys;
    // Partial Fisher-Yates: the first `count` entries become the sample.
    for (int i = 0; i < count; ++i) {
      const auto j = static_cast<std::size_t>(i) + uniform_index(rng, pool.size() - i);
      std::swap(pool[i], pool[j]);
      AffinityRule rule;
      rule.kind = kind;
      rule.strength = strength;
      rule.key = pool[i];
      rule.polarity = draw_polarity(config.affinity_ratio, rng);
      rule.value = draw_value(universe, rule.key, rng);
      spec.rules.push_back(rule);
    }
  };
  add_rules(node_keys, pattern.req_node, RuleKind::node, Strength::required);
  add_rules(node_keys, pattern.pref_node, RuleKind::node, Strength::preferred);
  add_rules(app_keys, pattern.req_app, RuleKind::inter_app, Strength::required);
  add_rules(app_keys, pattern.pref_app, RuleKind::inter_app, Strength::preferred);
  finish_spec(spec, config, rng);
  return spec;
}

std::vector<InstanceId> victim_sample(std::span<const InstanceId> population, std::size_t count,
                                      Rng& rng) {
  if (count > population.size()) {
    throw SamplingError(fmt::format("cannot sample {} victims from {} placed instances", count,
                                    population.size()));
  }
  std::vector<InstanceId> pool(population.begin(), population.end());
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(pool[i], pool[i + uniform_index(rng, pool.size() - i)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace colosim
