#include "colosim/config.hpp"

#include <fstream>
#include <set>
#include <type_traits>

#include <fmt/format.h>

#include "colosim/errors.hpp"

namespace colosim {

namespace {

using nlohmann::json;

void require_object(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", where));
}

void reject_unknown(const json& j, const std::string& where, std::set<std::string> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("unknown field '{}{}'", where.empty() ? "" : where + ".", key));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) return;
  if constexpr (std::is_unsigned_v<T>) {
    if (it->is_number_integer() && !it->is_number_unsigned() && it->template get<long long>() < 0) {
      throw ConfigError(fmt::format("{}.{} must be non-negative", where, key));
    }
  }
  try {
    out = it->template get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}.{}: {}", where, key, e.what()));
  }
}

ResourceVector read_max_request(const json& j, ResourceVector max) {
  read(j, "max_cpu", max.cpu_cores, "workload");
  read(j, "max_memory", max.memory, "workload");
  read(j, "max_disk", max.disk, "workload");
  read(j, "max_ports", max.network_ports, "workload");
  return max;
}

MigrationDestination parse_destination(const std::string& text) {
  if (text == "shortlist") return MigrationDestination::shortlist;
  if (text == "cluster-wide" || text == "cluster_wide") return MigrationDestination::cluster_wide;
  throw ConfigError(fmt::format("migration.destination must be 'shortlist' or 'cluster-wide', got '{}'", text));
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  require_object(j, "config");
  reject_unknown(j, "", {"seed", "slots", "apps_per_slot", "victim_count", "retry_limit",
                         "collect_audit", "check_invariants", "cluster", "workload", "attack", "scheduler",
                         "migration"});
  ExperimentConfig c;
  read(j, "seed", c.seed, "config");
  read(j, "slots", c.slots, "config");
  read(j, "apps_per_slot", c.apps_per_slot, "config");
  read(j, "victim_count", c.victim_count, "config");
  read(j, "retry_limit", c.retry_limit, "config");
  read(j, "collect_audit", c.collect_audit, "config");
  read(j, "check_invariants", c.check_invariants, "config");

  if (auto it = j.find("cluster"); it != j.end()) {
    const json& s = *it;
    require_object(s, "cluster");
    reject_unknown(s, "cluster", {"node_count", "node_label_keys", "app_label_keys",
                                  "values_per_key", "node_label_presence", "cpu_choices",
                                  "memory_choices", "disk_choices", "port_choices",
                                  "spreading_key"});
    auto& cl = c.cluster;
    read(s, "node_count", cl.node_count, "cluster");
    read(s, "node_label_keys", cl.node_label_keys, "cluster");
    read(s, "app_label_keys", cl.app_label_keys, "cluster");
    read(s, "values_per_key", cl.values_per_key, "cluster");
    read(s, "node_label_presence", cl.node_label_presence, "cluster");
    read(s, "cpu_choices", cl.cpu_choices, "cluster");
    read(s, "memory_choices", cl.memory_choices, "cluster");
    read(s, "disk_choices", cl.disk_choices, "cluster");
    read(s, "port_choices", cl.port_choices, "cluster");
    read(s, "spreading_key", cl.spreading_key, "cluster");
  }

  if (auto it = j.find("workload"); it != j.end()) {
    const json& s = *it;
    require_object(s, "workload");
    reject_unknown(s, "workload", {"p_m", "p_mn", "p_ma", "pattern", "max_cpu", "max_memory",
                                   "max_disk", "max_ports", "affinity_ratio", "required_ratio",
                                   "lifetime_min", "lifetime_max"});
    auto& w = c.workload;
    read(s, "p_m", w.p_m, "workload");
    read(s, "p_mn", w.p_mn, "workload");
    read(s, "p_ma", w.p_ma, "workload");
    if (auto p = s.find("pattern"); p != s.end() && !p->is_null()) {
      if (p->is_number_integer()) {
        w.pattern = AffinityPattern::parse(fmt::format("{:04d}", p->get<int>()));
      } else if (p->is_string()) {
        w.pattern = AffinityPattern::parse(p->get<std::string>());
      } else {
        throw ConfigError("workload.pattern must be a 4-digit string");
      }
    }
    w.max_request = read_max_request(s, w.max_request);
    read(s, "affinity_ratio", w.affinity_ratio, "workload");
    read(s, "required_ratio", w.required_ratio, "workload");
    read(s, "lifetime_min", w.lifetime_min, "workload");
    read(s, "lifetime_max", w.lifetime_max, "workload");
  }

  if (auto it = j.find("attack"); it != j.end()) {
    const json& s = *it;
    require_object(s, "attack");
    reject_unknown(s, "attack", {"k", "spreading", "noise", "delay_slots", "lifetime_slots"});
    auto& a = c.attack;
    read(s, "k", a.instance_count, "attack");
    read(s, "spreading", a.use_spreading_label, "attack");
    read(s, "noise", a.replication_noise, "attack");
    read(s, "delay_slots", a.delay_slots, "attack");
    read(s, "lifetime_slots", a.lifetime_slots, "attack");
  }

  if (auto it = j.find("scheduler"); it != j.end()) {
    const json& s = *it;
    require_object(s, "scheduler");
    reject_unknown(s, "scheduler", {"p_s", "preferred_match_weight",
                                    "preferred_anti_match_penalty", "resource_score_weight",
                                    "skippable_labels"});
    auto& sc = c.scheduler;
    read(s, "p_s", sc.skip_probability, "scheduler");
    read(s, "preferred_match_weight", sc.preferred_match_weight, "scheduler");
    read(s, "preferred_anti_match_penalty", sc.preferred_anti_match_penalty, "scheduler");
    read(s, "resource_score_weight", sc.resource_score_weight, "scheduler");
    if (auto l = s.find("skippable_labels"); l != s.end() && !l->is_null()) {
      std::vector<std::string> labels;
      read(s, "skippable_labels", labels, "scheduler");
      sc.skippable_labels = std::move(labels);
    }
  }

  if (auto it = j.find("migration"); it != j.end() && !it->is_null()) {
    const json& s = *it;
    require_object(s, "migration");
    reject_unknown(s, "migration", {"p_mi", "destination", "threshold", "allow_self"});
    MigrationConfig m;
    read(s, "p_mi", m.probability, "migration");
    std::string destination = "shortlist";
    read(s, "destination", destination, "migration");
    m.destination = parse_destination(destination);
    read(s, "threshold", m.success_threshold, "migration");
    read(s, "allow_self", m.allow_self_migration, "migration");
    c.migration = m;
  }

  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["slots"] = c.slots;
  j["apps_per_slot"] = c.apps_per_slot;
  j["victim_count"] = c.victim_count;
  j["retry_limit"] = c.retry_limit;
  j["collect_audit"] = c.collect_audit;
  j["check_invariants"] = c.check_invariants;
  const auto& cl = c.cluster;
  j["cluster"] = {{"node_count", cl.node_count},
                  {"node_label_keys", cl.node_label_keys},
                  {"app_label_keys", cl.app_label_keys},
                  {"values_per_key", cl.values_per_key},
                  {"node_label_presence", cl.node_label_presence},
                  {"cpu_choices", cl.cpu_choices},
                  {"memory_choices", cl.memory_choices},
                  {"disk_choices", cl.disk_choices},
                  {"port_choices", cl.port_choices},
                  {"spreading_key", cl.spreading_key}};
  const auto& w = c.workload;
  j["workload"] = {{"p_m", w.p_m},
                   {"p_mn", w.p_mn},
                   {"p_ma", w.p_ma},
                   {"pattern", w.pattern ? json(w.pattern->str()) : json(nullptr)},
                   {"max_cpu", w.max_request.cpu_cores},
                   {"max_memory", w.max_request.memory},
                   {"max_disk", w.max_request.disk},
                   {"max_ports", w.max_request.network_ports},
                   {"affinity_ratio", w.affinity_ratio},
                   {"required_ratio", w.required_ratio},
                   {"lifetime_min", w.lifetime_min},
                   {"lifetime_max", w.lifetime_max}};
  const auto& a = c.attack;
  j["attack"] = {{"k", a.instance_count},
                 {"spreading", a.use_spreading_label},
                 {"noise", a.replication_noise},
                 {"delay_slots", a.delay_slots},
                 {"lifetime_slots", a.lifetime_slots}};
  const auto& s = c.scheduler;
  j["scheduler"] = {{"p_s", s.skip_probability},
                    {"preferred_match_weight", s.preferred_match_weight},
                    {"preferred_anti_match_penalty", s.preferred_anti_match_penalty},
                    {"resource_score_weight", s.resource_score_weight},
                    {"skippable_labels",
                     s.skippable_labels ? json(*s.skippable_labels) : json(nullptr)}};
  if (c.migration) {
    const auto& m = *c.migration;
    j["migration"] = {{"p_mi", m.probability},
                      {"destination", m.destination == MigrationDestination::shortlist
                                          ? "shortlist"
                                          : "cluster-wide"},
                      {"threshold", m.success_threshold},
                      {"allow_self", m.allow_self_migration}};
  } else {
    j["migration"] = nullptr;
  }
  return j;
}

json read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("malformed config '{}': {}", path.string(), e.what()));
  }
}

}  // namespace colosim
