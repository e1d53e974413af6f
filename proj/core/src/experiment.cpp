#include "colosim/experiment.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <unordered_map>

#include <fmt/format.h>

#include "colosim/errors.hpp"

namespace colosim {

void validate(const ExperimentConfig& config) {
  if (config.slots < 1) throw ConfigError("slots must be >= 1");
  if (config.apps_per_slot < 0) throw ConfigError("apps_per_slot must be >= 0");
  if (config.victim_count < 0) throw ConfigError("victim_count must be >= 0");
  if (config.retry_limit < 0) throw ConfigError("retry_limit must be >= 0");
  validate(config.cluster);
  validate(config.workload);
  validate(config.attack);
  validate(config.scheduler);
  if (config.migration) validate(*config.migration);
  if (config.workload.pattern) {
    const auto& p = *config.workload.pattern;
    const auto node_keys = static_cast<int>(config.cluster.node_label_keys);
    const auto app_keys = static_cast<int>(config.cluster.app_label_keys);
    if (p.req_node > node_keys || p.pref_node > node_keys || p.req_app > app_keys ||
        p.pref_app > app_keys) {
      throw ConfigError(fmt::format("pattern {} exceeds the label universe ({} node keys, {} app keys)",
                                    p.str(), node_keys, app_keys));
    }
  }
}

// ---------------------------------------------------------------------------
// Metrics

std::optional<double> colocation_rate(std::span<const AttackOutcome> outcomes) {
  if (outcomes.empty()) return std::nullopt;
  const auto hits = std::count_if(outcomes.begin(), outcomes.end(),
                                  [](const AttackOutcome& o) { return o.success; });
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

std::optional<double> affinity_satisfaction(std::span<const ScheduleDecision> decisions) {
  long placed = 0;
  long satisfied = 0;
  for (const auto& d : decisions) {
    if (!d.placed()) continue;
    ++placed;
    if (d.violated_required == 0) ++satisfied;
  }
  if (placed == 0) return std::nullopt;
  return static_cast<double>(satisfied) / static_cast<double>(placed);
}

std::optional<double> mean_violated_specs(std::span<const ScheduleDecision> decisions) {
  long placed = 0;
  long violated = 0;
  for (const auto& d : decisions) {
    if (!d.placed()) continue;
    ++placed;
    violated += static_cast<long>(d.violated_required);
  }
  if (placed == 0) return std::nullopt;
  return static_cast<double>(violated) / static_cast<double>(placed);
}

// ---------------------------------------------------------------------------
// Audit records

namespace {

using nlohmann::json;

struct AuditToJson {
  json operator()(const audit::Decision& r) const {
    const auto& d = r.decision;
    json j{{"type", "decision"},
           {"slot", r.slot},
           {"instance", d.instance.value},
           {"role", to_string(r.role)},
           {"node", d.node ? json(d.node->value) : json(nullptr)},
           {"candidates", d.candidate_count},
           {"score", d.score},
           {"skipped", d.skipped_checks},
           {"violated", d.violated_required}};
    if (r.attack) j["attack"] = *r.attack;
    return j;
  }
  json operator()(const audit::Migration& r) const {
    return {{"type", "migration"},
            {"slot", r.slot},
            {"instance", r.event.instance.value},
            {"from", r.event.from.value},
            {"to", r.event.to.value}};
  }
  json operator()(const audit::Overlap& r) const {
    return {{"type", "overlap"}, {"slot", r.slot}, {"victim", r.victim.value},
            {"colocated", r.colocated}};
  }
  json operator()(const audit::Attack& r) const {
    json ids = json::array();
    for (auto id : r.instances) ids.push_back(id.value);
    return {{"type", "attack"}, {"attack", r.index}, {"victim", r.victim.value},
            {"instances", std::move(ids)}, {"success", r.success}};
  }
};

}  // namespace

json to_json(const AuditRecord& record) { return std::visit(AuditToJson{}, record); }

AuditRecord audit_record_from_json(const json& j) {
  try {
    const auto type = j.at("type").get<std::string>();
    if (type == "decision") {
      audit::Decision r;
      r.slot = j.at("slot").get<int>();
      r.role = parse_role(j.at("role").get<std::string>()).value_or(Role::normal);
      if (j.contains("attack")) r.attack = j.at("attack").get<std::size_t>();
      r.decision.instance = InstanceId{j.at("instance").get<std::uint64_t>()};
      if (!j.at("node").is_null()) r.decision.node = NodeId{j.at("node").get<std::uint32_t>()};
      r.decision.candidate_count = j.at("candidates").get<std::size_t>();
      r.decision.score = j.at("score").get<double>();
      r.decision.skipped_checks = j.at("skipped").get<std::size_t>();
      r.decision.violated_required = j.at("violated").get<std::size_t>();
      return r;
    }
    if (type == "migration") {
      return audit::Migration{j.at("slot").get<int>(),
                              {InstanceId{j.at("instance").get<std::uint64_t>()},
                               NodeId{j.at("from").get<std::uint32_t>()},
                               NodeId{j.at("to").get<std::uint32_t>()}}};
    }
    if (type == "overlap") {
      return audit::Overlap{j.at("slot").get<int>(), InstanceId{j.at("victim").get<std::uint64_t>()},
                            j.at("colocated").get<bool>()};
    }
    if (type == "attack") {
      audit::Attack r;
      r.index = j.at("attack").get<std::size_t>();
      r.victim = InstanceId{j.at("victim").get<std::uint64_t>()};
      for (const auto& id : j.at("instances")) r.instances.push_back(InstanceId{id.get<std::uint64_t>()});
      r.success = j.at("success").get<bool>();
      return r;
    }
    throw ParseError(fmt::format("unknown audit record type '{}'", type));
  } catch (const json::exception& e) {
    throw ParseError(fmt::format("malformed audit record: {}", e.what()));
  }
}

namespace {

void finalize_rates(ExperimentResult& r, long placed, long satisfied, long violated) {
  r.rejection_rate = r.decisions > 0 ? static_cast<double>(r.rejections) /
                                           static_cast<double>(r.decisions)
                                     : 0.0;
  if (placed > 0) {
    r.affinity_satisfaction = static_cast<double>(satisfied) / static_cast<double>(placed);
    r.mean_violated_specs = static_cast<double>(violated) / static_cast<double>(placed);
  }
  if (r.attacks_total > 0) {
    r.colocation_rate =
        static_cast<double>(r.attacks_successful) / static_cast<double>(r.attacks_total);
  }
}

}  // namespace

ExperimentResult recompute_from_audit(std::span<const AuditRecord> records) {
  ExperimentResult r;
  long satisfied = 0;
  long violated = 0;
  for (const auto& record : records) {
    if (const auto* d = std::get_if<audit::Decision>(&record)) {
      ++r.decisions;
      if (!d->decision.placed()) {
        ++r.rejections;
        continue;
      }
      ++r.placements;
      if (d->decision.violated_required == 0) ++satisfied;
      violated += static_cast<long>(d->decision.violated_required);
    } else if (std::holds_alternative<audit::Migration>(record)) {
      ++r.migrations;
    } else if (const auto* a = std::get_if<audit::Attack>(&record)) {
      ++r.attacks_total;
      if (a->success) ++r.attacks_successful;
    }
  }
  finalize_rates(r, r.placements, satisfied, violated);
  return r;
}

nlohmann::json summary_json(const ExperimentResult& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  return {{"colocation_rate", opt(r.colocation_rate)},
          {"affinity_satisfaction", opt(r.affinity_satisfaction)},
          {"mean_violated_specs", opt(r.mean_violated_specs)},
          {"attacks_total", r.attacks_total},
          {"attacks_successful", r.attacks_successful},
          {"rejection_rate", r.rejection_rate},
          {"decisions", r.decisions},
          {"rejections", r.rejections},
          {"placements", r.placements},
          {"dropped", r.dropped},
          {"migrations", r.migrations}};
}

// ---------------------------------------------------------------------------
// Slot-based driver

namespace {

enum Stream : std::uint64_t {
  kClusterStream = 1,
  kWorkloadStream,
  kSchedulerStream,
  kAttackStream,
  kMigrationStream,
  kVictimStream,
};

struct LiveInstance {
  AppSpec spec;
  int expiry_slot = INT_MAX;
  std::uint64_t order = 0;
};

struct Pending {
  AppSpec spec;
  int rejections = 0;
  std::optional<std::size_t> attack;
};

struct AttackState {
  InstanceId victim;
  std::vector<AppSpec> specs;
  std::vector<InstanceId> ids;
  int victim_expiry = INT_MAX;
  int unresolved = 0;
  bool latched = false;
};

class Simulation {
 public:
  explicit Simulation(const ExperimentConfig& config)
      : config_(config),
        cluster_(generate_cluster(config.cluster, derive_seed(config.seed, kClusterStream))),
        workload_rng_(derive_seed(config.seed, kWorkloadStream)),
        scheduler_rng_(derive_seed(config.seed, kSchedulerStream)),
        attack_rng_(derive_seed(config.seed, kAttackStream)),
        migration_rng_(derive_seed(config.seed, kMigrationStream)),
        victim_rng_(derive_seed(config.seed, kVictimStream)) {
    const auto key = cluster_.universe().spreading_key();
    if (!key) throw ConfigError("label universe has no spreading key");
    spreading_key_ = *key;
  }

  ExperimentResult run() {
    for (int slot = 0; slot < config_.slots; ++slot) step(slot);
    cluster_.audit();
    return finish();
  }

 private:
  void step(int slot) {
    expire(slot);

    std::vector<Pending> queue = std::move(normal_retries_);
    normal_retries_.clear();
    for (int i = 0; i < config_.apps_per_slot; ++i) queue.push_back({generate(slot), 0, {}});
    std::vector<InstanceId> placed_normals;
    for (auto& pending : queue) {
      const InstanceId id = pending.spec.id;
      if (place(pending, slot)) placed_normals.push_back(id);
    }

    designate_victims(slot, placed_normals);

    std::vector<Pending> attack_queue = std::move(attack_retries_);
    attack_retries_.clear();
    if (auto due = attacks_due_.find(slot); due != attacks_due_.end()) {
      for (std::size_t index : due->second) {
        for (auto& spec : attacks_[index].specs) attack_queue.push_back({std::move(spec), 0, index});
        attacks_[index].specs.clear();
      }
      attacks_due_.erase(due);
    }
    for (auto& pending : attack_queue) {
      AttackState& attack = attacks_[*pending.attack];
      if (!cluster_.location(attack.victim)) {
        resolve(attack);  // victim already gone
        continue;
      }
      place(pending, slot);
    }

    if (config_.migration) {
      migrate(slot);
      record_overlaps(slot);
    }
    if (config_.check_invariants) cluster_.audit();
  }

  AppSpec generate(int slot) {
    const InstanceId id{next_id_++};
    if (config_.workload.pattern) {
      return generate_app_spec_patterned(*config_.workload.pattern, config_.workload,
                                         cluster_.universe(), workload_rng_, id, slot);
    }
    return generate_app_spec(config_.workload, cluster_.universe(), workload_rng_, id, slot);
  }

  // Schedules one queued spec; handles bookkeeping, retries and attack latching.
  std::optional<NodeId> place(Pending& pending, int slot) {
    ScheduleDecision decision =
        colosim::schedule(pending.spec, cluster_, config_.scheduler, scheduler_rng_);
    ++result_.decisions;
    if (config_.collect_audit) {
      result_.audit.emplace_back(audit::Decision{slot, pending.spec.role, pending.attack, decision});
    }

    if (!decision.placed()) {
      ++result_.rejections;
      if (++pending.rejections <= config_.retry_limit) {
        (pending.attack ? attack_retries_ : normal_retries_).push_back(std::move(pending));
      } else {
        ++result_.dropped;
        if (pending.attack) resolve(attacks_[*pending.attack]);
      }
      return std::nullopt;
    }

    ++result_.placements;
    if (decision.violated_required == 0) ++satisfied_;
    violated_ += static_cast<long>(decision.violated_required);

    int expiry = slot + pending.spec.lifetime_slots;
    if (pending.attack) {
      AttackState& attack = attacks_[*pending.attack];
      if (pending.spec.lifetime_slots == 0) expiry = attack.victim_expiry;
      if (cluster_.location(attack.victim) == decision.node) attack.latched = true;
      resolve(attack);
    }
    const InstanceId id = pending.spec.id;
    const std::uint64_t order = next_order_++;
    placement_order_.emplace(order, id);
    expiries_[expiry].push_back(id);
    live_.emplace(id, LiveInstance{std::move(pending.spec), expiry, order});
    return decision.node;
  }

  void resolve(AttackState& attack) { --attack.unresolved; }

  void expire(int slot) {
    auto it = expiries_.find(slot);
    if (it == expiries_.end()) return;
    for (InstanceId id : it->second) {
      auto live = live_.find(id);
      if (live == live_.end()) continue;
      cluster_.release(id);
      placement_order_.erase(live->second.order);
      live_.erase(live);
      active_victims_.erase(id);
    }
    expiries_.erase(it);
  }

  void designate_victims(int slot, const std::vector<InstanceId>& placed_normals) {
    const auto total = static_cast<long long>(config_.victim_count);
    const auto quota = (slot + 1) * total / config_.slots - slot * total / config_.slots;
    victim_deficit_ += quota;
    const auto count =
        std::min<std::size_t>(static_cast<std::size_t>(victim_deficit_), placed_normals.size());
    if (count == 0) return;
    victim_deficit_ -= static_cast<long long>(count);

    for (InstanceId victim : victim_sample(placed_normals, count, victim_rng_)) {
      LiveInstance& live = live_.at(victim);
      live.spec.role = Role::victim;

      const std::size_t index = attacks_.size();
      const SpreadingLabel spreading{
          spreading_key_,
          cluster_.universe().intern_value(spreading_key_, fmt::format("nu-{}", index))};
      AttackState attack;
      attack.victim = victim;
      attack.victim_expiry = live.expiry_slot;
      attack.specs = repttack_specs(live.spec, config_.attack, spreading, attack_rng_);
      const int due = slot + config_.attack.delay_slots;
      for (auto& spec : attack.specs) {
        spec.id = InstanceId{next_id_++};
        spec.submit_slot = due;
        attack.ids.push_back(spec.id);
      }
      attack.unresolved = static_cast<int>(attack.specs.size());
      attacks_.push_back(std::move(attack));
      attacks_due_[due].push_back(index);
      active_victims_.emplace(victim, index);
    }
  }

  void migrate(int slot) {
    std::vector<const AppSpec*> placed;
    placed.reserve(placement_order_.size());
    for (const auto& [order, id] : placement_order_) placed.push_back(&live_.at(id).spec);
    const auto events = migrate_step(cluster_, placed, *config_.migration, migration_rng_);
    result_.migrations += static_cast<long>(events.size());
    if (config_.collect_audit) {
      for (const auto& event : events) result_.audit.emplace_back(audit::Migration{slot, event});
    }
  }

  void record_overlaps(int slot) {
    for (const auto& [victim, index] : active_victims_) {
      const auto& ids = attacks_[index].ids;
      ledger_.record(victim, ids, cluster_);
      if (config_.collect_audit) {
        const bool colocated = is_colocated(victim, ids, cluster_).value_or(false);
        result_.audit.emplace_back(audit::Overlap{slot, victim, colocated});
      }
    }
  }

  ExperimentResult finish() {
    for (std::size_t index = 0; index < attacks_.size(); ++index) {
      const AttackState& attack = attacks_[index];
      if (attack.unresolved > 0) continue;  // still queued when the run ended
      bool success = attack.latched;
      if (config_.migration) {
        const OverlapEntry* entry = ledger_.entry(attack.victim);
        success = entry && lifetime_success(*entry, config_.migration->success_threshold).value_or(false);
      }
      ++result_.attacks_total;
      if (success) ++result_.attacks_successful;
      if (config_.collect_audit) {
        result_.audit.emplace_back(audit::Attack{index, attack.victim, attack.ids, success});
      }
    }
    finalize_rates(result_, result_.placements, satisfied_, violated_);
    return std::move(result_);
  }

  const ExperimentConfig& config_;
  ClusterState cluster_;
  Rng workload_rng_;
  Rng scheduler_rng_;
  Rng attack_rng_;
  Rng migration_rng_;
  Rng victim_rng_;
  LabelKey spreading_key_ = 0;

  std::uint64_t next_id_ = 1;
  std::uint64_t next_order_ = 0;
  std::unordered_map<InstanceId, LiveInstance> live_;
  std::map<std::uint64_t, InstanceId> placement_order_;
  std::map<int, std::vector<InstanceId>> expiries_;
  std::vector<Pending> normal_retries_;
  std::vector<Pending> attack_retries_;
  std::vector<AttackState> attacks_;
  std::map<int, std::vector<std::size_t>> attacks_due_;
  std::map<InstanceId, std::size_t> active_victims_;  // ordered for deterministic ledger audit
  long long victim_deficit_ = 0;
  OverlapLedger ledger_;

  ExperimentResult result_;
  long satisfied_ = 0;
  long violated_ = 0;
};

}  // namespace

ExperimentResult run(const ExperimentConfig& config) {
  validate(config);
  Simulation sim(config);
  return sim.run();
}

}  // namespace colosim
