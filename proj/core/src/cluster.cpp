#include "colosim/cluster.hpp"

#include <algorithm>
#include <array>

#include <fmt/format.h>

#include "colosim/errors.hpp"
#include "colosim/rng.hpp"

namespace colosim {

std::string ResourceVector::to_string() const {
  return fmt::format("({},{},{},{})", cpu_cores, memory, disk, network_ports);
}

namespace {

constexpr std::array<const char*, 5> kNodeKeyNames{"cpu-type", "gpu-type", "disk-type",
                                                   "memory-class", "region"};
constexpr std::array<const char*, 5> kAppKeyNames{"app", "tier", "team", "env", "version"};

std::vector<std::string> value_domain(std::size_t n) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(i < 26 ? std::string(1, static_cast<char>('a' + i)) : fmt::format("v{}", i));
  }
  return out;
}

void check_choices(const std::vector<std::int64_t>& choices, const char* name) {
  if (choices.empty()) throw ConfigError(fmt::format("cluster.{} must not be empty", name));
  for (auto c : choices) {
    if (c <= 0) throw ConfigError(fmt::format("cluster.{} entries must be positive", name));
  }
}

}  // namespace

void validate(const ClusterGenConfig& config) {
  if (config.node_count < 1) throw ConfigError("cluster.node_count must be >= 1");
  if (config.values_per_key < 1) throw ConfigError("cluster.values_per_key must be >= 1 (empty value domain)");
  if (!(config.node_label_presence >= 0.0 && config.node_label_presence <= 1.0)) {
    throw ConfigError("cluster.node_label_presence must be in [0, 1]");
  }
  if (config.spreading_key.empty()) throw ConfigError("cluster.spreading_key must not be empty");
  check_choices(config.cpu_choices, "cpu_choices");
  check_choices(config.memory_choices, "memory_choices");
  check_choices(config.disk_choices, "disk_choices");
  check_choices(config.port_choices, "port_choices");
}

LabelUniverse make_label_universe(const ClusterGenConfig& config) {
  LabelUniverse universe;
  for (std::size_t i = 0; i < config.node_label_keys; ++i) {
    universe.add_key(i < kNodeKeyNames.size() ? kNodeKeyNames[i] : fmt::format("node-label-{}", i),
                     LabelKind::node, value_domain(config.values_per_key));
  }
  for (std::size_t i = 0; i < config.app_label_keys; ++i) {
    universe.add_key(i < kAppKeyNames.size() ? kAppKeyNames[i] : fmt::format("app-label-{}", i),
                     LabelKind::app, value_domain(config.values_per_key));
  }
  universe.add_key(config.spreading_key, LabelKind::spreading, {});
  return universe;
}

ClusterState::ClusterState(LabelUniverse universe, std::vector<Node> nodes)
    : universe_(std::move(universe)), nodes_(std::move(nodes)) {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id.value != i) {
      throw std::invalid_argument("node ids must equal their position");
    }
    if (!nodes_[i].residents.empty() || nodes_[i].allocated != ResourceVector{}) {
      throw std::invalid_argument("nodes must start empty");
    }
  }
}

const Node& ClusterState::node(NodeId id) const {
  if (id.value >= nodes_.size()) throw NotFoundError(fmt::format("unknown node {}", id.value));
  return nodes_[id.value];
}

Node& ClusterState::mutable_node(NodeId id) {
  if (id.value >= nodes_.size()) throw NotFoundError(fmt::format("unknown node {}", id.value));
  return nodes_[id.value];
}

void ClusterState::allocate(NodeId node_id, InstanceId instance, const ResourceVector& request,
                            const LabelMap& labels) {
  Node& node = mutable_node(node_id);
  if (!request.non_negative()) {
    throw CapacityError(fmt::format("negative request {} for instance {}", request.to_string(),
                                    instance.value));
  }
  if (!request.fits_in(node.free())) {
    throw CapacityError(fmt::format("request {} exceeds free capacity {} on node {}",
                                    request.to_string(), node.free().to_string(), node_id.value));
  }
  if (residents_.contains(instance)) {
    throw std::invalid_argument(fmt::format("instance {} already placed", instance.value));
  }
  node.allocated += request;
  node.residents.push_back(instance);
  for (const auto& [k, v] : labels) ++node.resident_labels[pack_label(k, v)];
  residents_.emplace(instance, Resident{node_id, request, labels});
}

void ClusterState::release(NodeId node_id, InstanceId instance) {
  auto it = residents_.find(instance);
  if (it == residents_.end() || it->second.node != node_id) {
    throw NotFoundError(fmt::format("instance {} is not resident on node {}", instance.value,
                                    node_id.value));
  }
  Node& node = mutable_node(node_id);
  node.allocated -= it->second.request;
  std::erase(node.residents, instance);
  for (const auto& [k, v] : it->second.labels) {
    auto label = node.resident_labels.find(pack_label(k, v));
    if (--label->second == 0) node.resident_labels.erase(label);
  }
  residents_.erase(it);
}

void ClusterState::release(InstanceId instance) {
  auto where = location(instance);
  if (!where) throw NotFoundError(fmt::format("instance {} is not placed", instance.value));
  release(*where, instance);
}

std::optional<NodeId> ClusterState::location(InstanceId instance) const {
  auto it = residents_.find(instance);
  if (it == residents_.end()) return std::nullopt;
  return it->second.node;
}

const Resident* ClusterState::resident(InstanceId instance) const {
  auto it = residents_.find(instance);
  return it == residents_.end() ? nullptr : &it->second;
}

void ClusterState::audit() const {
  std::size_t resident_total = 0;
  for (const Node& node : nodes_) {
    if (!node.allocated.non_negative() || !node.allocated.fits_in(node.capacity)) {
      throw InvariantError(fmt::format("node {} allocated {} outside capacity {}", node.id.value,
                                       node.allocated.to_string(), node.capacity.to_string()));
    }
    ResourceVector sum;
    std::unordered_map<std::uint64_t, std::uint32_t> labels;
    for (InstanceId id : node.residents) {
      auto it = residents_.find(id);
      if (it == residents_.end() || it->second.node != node.id) {
        throw InvariantError(fmt::format("node {} lists stray instance {}", node.id.value, id.value));
      }
      sum += it->second.request;
      for (const auto& [k, v] : it->second.labels) ++labels[pack_label(k, v)];
    }
    if (sum != node.allocated) {
      throw InvariantError(fmt::format("node {} allocated {} but residents sum to {}",
                                       node.id.value, node.allocated.to_string(), sum.to_string()));
    }
    if (labels != node.resident_labels) {
      throw InvariantError(fmt::format("node {} resident label index out of sync", node.id.value));
    }
    resident_total += node.residents.size();
  }
  if (resident_total != residents_.size()) {
    throw InvariantError("instance table and node resident lists disagree");
  }
}

nlohmann::json ClusterState::to_json() const {
  auto vec = [](const ResourceVector& r) {
    return nlohmann::json{{"cpu_cores", r.cpu_cores}, {"memory", r.memory}, {"disk", r.disk},
                          {"network_ports", r.network_ports}};
  };
  nlohmann::json nodes = nlohmann::json::array();
  for (const Node& node : nodes_) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [k, v] : node.labels) labels[universe_.key_name(k)] = universe_.value_name(k, v);
    nlohmann::json residents = nlohmann::json::array();
    for (InstanceId id : node.residents) residents.push_back(id.value);
    nodes.push_back({{"id", node.id.value},
                     {"capacity", vec(node.capacity)},
                     {"allocated", vec(node.allocated)},
                     {"labels", std::move(labels)},
                     {"residents", std::move(residents)}});
  }
  return {{"nodes", std::move(nodes)}};
}

ClusterState generate_cluster(const ClusterGenConfig& config, std::uint64_t seed) {
  validate(config);
  LabelUniverse universe = make_label_universe(config);
  const auto node_keys = universe.keys_of(LabelKind::node);
  Rng rng(seed);
  auto pick = [&rng](const std::vector<std::int64_t>& choices) {
    return choices[uniform_index(rng, choices.size())];
  };

  std::vector<Node> nodes(config.node_count);
  for (std::size_t i = 0; i < config.node_count; ++i) {
    Node& node = nodes[i];
    node.id = NodeId{static_cast<std::uint32_t>(i)};
    node.capacity.cpu_cores = pick(config.cpu_choices);
    node.capacity.memory = pick(config.memory_choices);
    node.capacity.disk = pick(config.disk_choices);
    node.capacity.network_ports = pick(config.port_choices);
    for (LabelKey key : node_keys) {
      if (bernoulli(rng, config.node_label_presence)) {
        node.labels.set(key, static_cast<LabelValue>(uniform_index(rng, universe.domain_size(key))));
      }
    }
  }
  return ClusterState(std::move(universe), std::move(nodes));
}

}  // namespace colosim
