#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "colosim/labels.hpp"
#include "colosim/workload.hpp"

namespace colosim {

struct ManifestOptions {
  std::string name_prefix = "colosim";
  std::string topology_key = "kubernetes.io/hostname";
  int preferred_weight = 50;
  std::vector<std::string> images{"traefik", "nginx", "tomcat", "redis", "mongo", "wordpress"};
};

inline constexpr std::string_view kPortsResource = "colosim.io/network-ports";
inline constexpr std::string_view kInstanceAnnotation = "colosim.io/instance-id";
inline constexpr std::string_view kRoleAnnotation = "colosim.io/role";
inline constexpr std::string_view kSubmitSlotAnnotation = "colosim.io/submit-slot";
inline constexpr std::string_view kLifetimeAnnotation = "colosim.io/lifetime-slots";

/// Renders a spec as a v1 Pod manifest. Required node rules become a single
/// nodeSelectorTerm (In for affinity, NotIn for anti-affinity); inter-app
/// rules become podAffinity / podAntiAffinity terms keyed on the topology key.
/// Throws ExportError for labels the universe cannot name.
std::string to_pod_manifest(const AppSpec& spec, const LabelUniverse& universe,
                            const ManifestOptions& options = {});

/// Inverse of to_pod_manifest on the equality-only subset. Unknown label keys
/// and values are interned into `universe`. Throws ParseError listing every
/// unsupported construct found.
AppSpec parse_pod_manifest(std::string_view document, LabelUniverse& universe,
                           const ManifestOptions& options = {});

}  // namespace colosim
