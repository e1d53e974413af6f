#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "colosim/labels.hpp"
#include "colosim/resources.hpp"

namespace colosim {

struct NodeId {
  std::uint32_t value = 0;
  friend constexpr auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct InstanceId {
  std::uint64_t value = 0;
  friend constexpr auto operator<=>(const InstanceId&, const InstanceId&) = default;
};

}  // namespace colosim

template <>
struct std::hash<colosim::NodeId> {
  std::size_t operator()(const colosim::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

template <>
struct std::hash<colosim::InstanceId> {
  std::size_t operator()(const colosim::InstanceId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};

namespace colosim {

/// A physical machine. Fields are read freely; mutation goes through
/// ClusterState so `allocated` and the resident label index stay in sync
/// with `residents`.
struct Node {
  NodeId id;
  ResourceVector capacity;
  ResourceVector allocated;
  LabelMap labels;
  std::vector<InstanceId> residents;
  // pack_label(key, value) -> number of residents carrying that pair.
  std::unordered_map<std::uint64_t, std::uint32_t> resident_labels;

  ResourceVector free() const { return capacity - allocated; }
  bool hosts_label(LabelKey key, LabelValue value) const {
    return resident_labels.contains(pack_label(key, value));
  }
};

struct Resident {
  NodeId node;
  ResourceVector request;
  LabelMap labels;
};

struct ClusterGenConfig {
  std::size_t node_count = 100;
  std::size_t node_label_keys = 5;
  std::size_t app_label_keys = 5;
  std::size_t values_per_key = 3;
  double node_label_presence = 1.0;
  std::vector<std::int64_t> cpu_choices{24, 48, 96, 192};
  std::vector<std::int64_t> memory_choices{48, 96, 192, 384};
  std::vector<std::int64_t> disk_choices{768, 1536, 3072};
  std::vector<std::int64_t> port_choices{24, 48};
  std::string spreading_key = "colosim.io/spread";
};

void validate(const ClusterGenConfig& config);

// Five node keys, five app keys and the spreading key under the defaults.
LabelUniverse make_label_universe(const ClusterGenConfig& config);

class ClusterState {
 public:
  ClusterState() = default;
  ClusterState(LabelUniverse universe, std::vector<Node> nodes);

  const LabelUniverse& universe() const { return universe_; }
  LabelUniverse& universe() { return universe_; }

  std::span<const Node> nodes() const { return nodes_; }
  const Node& node(NodeId id) const;
  std::size_t size() const { return nodes_.size(); }

  // Throws CapacityError when `request` does not fit the node's free capacity.
  void allocate(NodeId node, InstanceId instance, const ResourceVector& request,
                const LabelMap& labels = {});
  // Throws NotFoundError when the instance is not resident on `node`.
  void release(NodeId node, InstanceId instance);
  void release(InstanceId instance);

  std::optional<NodeId> location(InstanceId instance) const;
  const Resident* resident(InstanceId instance) const;
  std::size_t instance_count() const { return residents_.size(); }

  // Walks every node and checks allocated <= capacity and that allocated and
  // the label index equal the sums over residents. Throws InvariantError.
  void audit() const;

  nlohmann::json to_json() const;

 private:
  Node& mutable_node(NodeId id);

  LabelUniverse universe_;
  std::vector<Node> nodes_;
  std::unordered_map<InstanceId, Resident> residents_;
};

ClusterState generate_cluster(const ClusterGenConfig& config, std::uint64_t seed);

}  // namespace colosim
