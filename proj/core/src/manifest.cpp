#include "colosim/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <optional>
#include <tuple>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "colosim/errors.hpp"

namespace colosim {

namespace {

constexpr const char* kRequired = "requiredDuringSchedulingIgnoredDuringExecution";
constexpr const char* kPreferred = "preferredDuringSchedulingIgnoredDuringExecution";

std::string role_prefix(Role role) { return std::string(to_string(role)); }

// True when a plain scalar would resolve to something other than a string
// under the YAML core schema ("2", "1e3", "true", "null", "~").
bool resolves_to_non_string(const std::string& s) {
  if (s.empty() || s == "~") return true;
  static const char* const kWords[] = {"true", "false", "True", "False", "TRUE", "FALSE",
                                       "null", "Null", "NULL", "yes", "no", "on", "off"};
  for (const char* w : kWords) {
    if (s == w) return true;
  }
  double d = 0;
  const char* begin = s.data() + (s[0] == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), d);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

void write_yaml(YAML::Emitter& out, const YAML::Node& node, bool integer) {
  switch (node.Type()) {
    case YAML::NodeType::Map:
      out << YAML::BeginMap;
      for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        out << YAML::Key << key << YAML::Value;
        write_yaml(out, kv.second, key == "weight");
      }
      out << YAML::EndMap;
      break;
    case YAML::NodeType::Sequence:
      out << YAML::BeginSeq;
      for (const auto& item : node) write_yaml(out, item, false);
      out << YAML::EndSeq;
      break;
    default: {
      const auto& text = node.Scalar();
      if (!integer && resolves_to_non_string(text)) out << YAML::DoubleQuoted;
      out << text;
    }
  }
}

// ---------------------------------------------------------------------------
// Emission

class Emitter {
 public:
  Emitter(const LabelUniverse& universe, const ManifestOptions& options)
      : universe_(universe), options_(options) {}

  std::string emit(const AppSpec& spec) const {
    if (!spec.request.non_negative()) {
      throw ExportError(fmt::format("instance {} has a negative resource request {}",
                                    spec.id.value, spec.request.to_string()));
    }
    if (options_.preferred_weight < 1 || options_.preferred_weight > 100) {
      throw ExportError(fmt::format("preferred weight {} outside the 1-100 range",
                                    options_.preferred_weight));
    }
    if (options_.images.empty()) throw ExportError("no container images configured");

    YAML::Node pod;
    pod["apiVersion"] = "v1";
    pod["kind"] = "Pod";

    YAML::Node metadata;
    metadata["name"] = fmt::format("{}-{}-{}", options_.name_prefix, role_prefix(spec.role),
                                   spec.id.value);
    if (!spec.own_labels.empty()) {
      YAML::Node labels;
      for (const auto& [k, v] : spec.own_labels) labels[key(k)] = value(k, v);
      metadata["labels"] = labels;
    }
    YAML::Node annotations;
    annotations[std::string(kInstanceAnnotation)] = std::to_string(spec.id.value);
    annotations[std::string(kRoleAnnotation)] = std::string(to_string(spec.role));
    annotations[std::string(kSubmitSlotAnnotation)] = std::to_string(spec.submit_slot);
    annotations[std::string(kLifetimeAnnotation)] = std::to_string(spec.lifetime_slots);
    metadata["annotations"] = annotations;
    pod["metadata"] = metadata;

    YAML::Node container;
    container["name"] = "main";
    container["image"] = options_.images[spec.id.value % options_.images.size()];
    YAML::Node requests;
    requests["cpu"] = std::to_string(spec.request.cpu_cores);
    requests["memory"] = fmt::format("{}Mi", spec.request.memory * kMemoryUnitMiB);
    requests["ephemeral-storage"] = fmt::format("{}Mi", spec.request.disk * kDiskUnitMiB);
    requests[std::string(kPortsResource)] = std::to_string(spec.request.network_ports);
    container["resources"]["requests"] = requests;

    YAML::Node pod_spec;
    pod_spec["containers"].push_back(container);
    if (auto affinity = emit_affinity(spec.rules)) pod_spec["affinity"] = *affinity;
    pod["spec"] = pod_spec;

    YAML::Emitter out;
    write_yaml(out, pod, false);
    return std::string(out.c_str()) + "\n";
  }

 private:
  std::string key(LabelKey k) const {
    try {
      return universe_.key_name(k);
    } catch (const std::out_of_range&) {
      throw ExportError(fmt::format("label key id {} is not in the label universe", k));
    }
  }

  std::string value(LabelKey k, LabelValue v) const {
    try {
      return universe_.value_name(k, v);
    } catch (const std::out_of_range&) {
      throw ExportError(fmt::format("label value id {} of key '{}' has no name", v, key(k)));
    }
  }

  YAML::Node expression(const AffinityRule& rule) const {
    YAML::Node e;
    e["key"] = key(rule.key);
    e["operator"] = rule.polarity == Polarity::affinity ? "In" : "NotIn";
    e["values"].push_back(value(rule.key, rule.value));
    return e;
  }

  YAML::Node pod_term(const AffinityRule& rule) const {
    YAML::Node term;
    term["labelSelector"]["matchLabels"][key(rule.key)] = value(rule.key, rule.value);
    term["topologyKey"] = options_.topology_key;
    return term;
  }

  std::optional<YAML::Node> emit_affinity(const std::vector<AffinityRule>& rules) const {
    YAML::Node node_required_terms;
    YAML::Node node_preferred;
    YAML::Node pod_required[2];
    YAML::Node pod_preferred[2];
    bool any_node_required = false;

    for (const auto& rule : rules) {
      if (rule.kind == RuleKind::node) {
        if (rule.required()) {
          node_required_terms.push_back(expression(rule));
          any_node_required = true;
        } else {
          YAML::Node term;
          term["weight"] = options_.preferred_weight;
          term["preference"]["matchExpressions"].push_back(expression(rule));
          node_preferred.push_back(term);
        }
      } else {
        const int anti = rule.polarity == Polarity::anti_affinity ? 1 : 0;
        if (rule.required()) {
          pod_required[anti].push_back(pod_term(rule));
        } else {
          YAML::Node term;
          term["weight"] = options_.preferred_weight;
          term["podAffinityTerm"] = pod_term(rule);
          pod_preferred[anti].push_back(term);
        }
      }
    }

    YAML::Node affinity;
    bool any = false;
    if (any_node_required || node_preferred.size() > 0) {
      YAML::Node node_affinity;
      if (any_node_required) {
        YAML::Node term;
        term["matchExpressions"] = node_required_terms;
        node_affinity[kRequired]["nodeSelectorTerms"].push_back(term);
      }
      if (node_preferred.size() > 0) node_affinity[kPreferred] = node_preferred;
      affinity["nodeAffinity"] = node_affinity;
      any = true;
    }
    const char* names[2] = {"podAffinity", "podAntiAffinity"};
    for (int anti = 0; anti < 2; ++anti) {
      if (pod_required[anti].size() == 0 && pod_preferred[anti].size() == 0) continue;
      YAML::Node section;
      if (pod_required[anti].size() > 0) section[kRequired] = pod_required[anti];
      if (pod_preferred[anti].size() > 0) section[kPreferred] = pod_preferred[anti];
      affinity[names[anti]] = section;
      any = true;
    }
    if (!any) return std::nullopt;
    return affinity;
  }

  const LabelUniverse& universe_;
  const ManifestOptions& options_;
};

// ---------------------------------------------------------------------------
// Parsing

class Parser {
 public:
  Parser(LabelUniverse& universe, const ManifestOptions& options)
      : universe_(universe), options_(options) {}

  AppSpec parse(std::string_view document) {
    YAML::Node root;
    try {
      root = YAML::Load(std::string(document));
    } catch (const YAML::Exception& e) {
      throw ParseError(fmt::format("malformed manifest: {}", e.what()));
    }
    if (!root.IsMap()) throw ParseError("malformed manifest: top level is not a mapping");
    if (auto kind = root["kind"]; kind && scalar(kind, "kind") != "Pod") {
      throw ParseError(fmt::format("unsupported manifest kind '{}'", scalar(kind, "kind")));
    }
    const YAML::Node spec_node = root["spec"];
    if (!spec_node || !spec_node.IsMap()) throw ParseError("malformed manifest: missing spec mapping");

    AppSpec spec;
    spec.request = ResourceVector{};
    parse_metadata(root["metadata"], spec);
    parse_containers(spec_node["containers"], spec);
    for (const auto& entry : spec_node) {
      const auto name = entry.first.as<std::string>();
      if (name != "containers" && name != "affinity") {
        // Scheduling-relevant fields we cannot model.
        if (name == "nodeSelector" || name == "tolerations" || name == "nodeName" ||
            name == "topologySpreadConstraints") {
          unsupported("spec." + name);
        }
      }
    }
    if (auto affinity = spec_node["affinity"]) parse_affinity(affinity, spec);

    if (!problems_.empty()) {
      std::string list;
      for (const auto& p : problems_) list += "\n  - " + p;
      throw ParseError(fmt::format("unsupported manifest constructs:{}", list));
    }
    std::sort(spec.rules.begin(), spec.rules.end(), [](const AffinityRule& a, const AffinityRule& b) {
      return std::tuple(a.kind, a.strength, a.polarity, a.key, a.value) <
             std::tuple(b.kind, b.strength, b.polarity, b.key, b.value);
    });
    return spec;
  }

 private:
  std::string scalar(const YAML::Node& node, const std::string& where) {
    if (!node.IsScalar()) throw ParseError(fmt::format("malformed manifest: {} must be a scalar", where));
    return node.as<std::string>();
  }

  long long integer(const YAML::Node& node, const std::string& where) {
    const auto text = scalar(node, where);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ParseError(fmt::format("malformed manifest: {} must be an integer, got '{}'", where, text));
    }
    return v;
  }

  void unsupported(std::string what) { problems_.push_back(std::move(what)); }

  void parse_metadata(const YAML::Node& metadata, AppSpec& spec) {
    if (!metadata) return;
    if (!metadata.IsMap()) throw ParseError("malformed manifest: metadata is not a mapping");
    if (auto labels = metadata["labels"]) {
      if (!labels.IsMap()) throw ParseError("malformed manifest: metadata.labels is not a mapping");
      for (const auto& entry : labels) {
        const auto k = intern_pod_key(entry.first.as<std::string>());
        spec.own_labels.set(k, universe_.intern_value(k, scalar(entry.second, "label value")));
      }
    }
    if (auto annotations = metadata["annotations"]; annotations && annotations.IsMap()) {
      if (auto v = annotations[std::string(kInstanceAnnotation)]) {
        spec.id = InstanceId{static_cast<std::uint64_t>(integer(v, "instance id annotation"))};
      }
      if (auto v = annotations[std::string(kRoleAnnotation)]) {
        auto role = parse_role(scalar(v, "role annotation"));
        if (!role) throw ParseError("malformed manifest: unknown role annotation");
        spec.role = *role;
      }
      if (auto v = annotations[std::string(kSubmitSlotAnnotation)]) {
        spec.submit_slot = static_cast<int>(integer(v, "submit slot annotation"));
      }
      if (auto v = annotations[std::string(kLifetimeAnnotation)]) {
        spec.lifetime_slots = static_cast<int>(integer(v, "lifetime annotation"));
      }
    }
  }

  // Quantities like "2048Mi", "2Gi" or plain bytes, returned in MiB.
  std::optional<long long> mebibytes(const std::string& text) {
    auto number = [](std::string_view s) -> std::optional<long long> {
      long long v = 0;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc{} || ptr != s.data() + s.size() || v < 0) return std::nullopt;
      return v;
    };
    std::string_view s = text;
    if (s.ends_with("Mi")) return number(s.substr(0, s.size() - 2));
    if (s.ends_with("Gi")) {
      auto v = number(s.substr(0, s.size() - 2));
      if (v) return *v * 1024;
      return std::nullopt;
    }
    if (auto bytes = number(s); bytes && *bytes % (1024 * 1024) == 0) return *bytes / (1024 * 1024);
    return std::nullopt;
  }

  void parse_containers(const YAML::Node& containers, AppSpec& spec) {
    if (!containers || !containers.IsSequence() || containers.size() == 0) {
      throw ParseError("malformed manifest: spec.containers must be a non-empty list");
    }
    bool seen[4] = {false, false, false, false};
    for (const auto& container : containers) {
      auto requests = container["resources"]["requests"];
      if (!requests) continue;
      if (!requests.IsMap()) throw ParseError("malformed manifest: resources.requests is not a mapping");
      for (const auto& entry : requests) {
        const auto name = entry.first.as<std::string>();
        const auto text = scalar(entry.second, "resource request");
        if (name == "cpu") {
          long long cores = 0;
          if (text.ends_with("m")) {
            auto milli = std::stoll(text.substr(0, text.size() - 1));
            if (milli % 1000 != 0) {
              unsupported(fmt::format("fractional cpu request '{}'", text));
              continue;
            }
            cores = milli / 1000;
          } else {
            cores = integer(entry.second, "cpu request");
          }
          spec.request.cpu_cores += cores;
          seen[0] = true;
        } else if (name == "memory" || name == "ephemeral-storage") {
          const bool memory = name == "memory";
          const long long unit = memory ? kMemoryUnitMiB : kDiskUnitMiB;
          auto mib = mebibytes(text);
          if (!mib || *mib % unit != 0) {
            unsupported(fmt::format("{} request '{}' is not a multiple of {}Mi", name, text, unit));
            continue;
          }
          (memory ? spec.request.memory : spec.request.disk) += *mib / unit;
          seen[memory ? 1 : 2] = true;
        } else if (name == kPortsResource) {
          spec.request.network_ports += integer(entry.second, "port request");
          seen[3] = true;
        } else {
          unsupported(fmt::format("resource request '{}'", name));
        }
      }
    }
    // Absent requests default to the minimum unit.
    if (!seen[0]) spec.request.cpu_cores = kMinimumRequest.cpu_cores;
    if (!seen[1]) spec.request.memory = kMinimumRequest.memory;
    if (!seen[2]) spec.request.disk = kMinimumRequest.disk;
    if (!seen[3]) spec.request.network_ports = kMinimumRequest.network_ports;
  }

  LabelKey intern_pod_key(const std::string& name) {
    return universe_.intern_key(name, LabelKind::app);
  }

  void check_keys(const YAML::Node& node, const std::string& where,
                  std::initializer_list<const char*> allowed) {
    if (!node.IsMap()) {
      unsupported(where + " is not a mapping");
      return;
    }
    for (const auto& entry : node) {
      const auto name = entry.first.as<std::string>();
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return name == a; })) {
        unsupported(fmt::format("{}.{}", where, name));
      }
    }
  }

  void parse_affinity(const YAML::Node& affinity, AppSpec& spec) {
    check_keys(affinity, "spec.affinity", {"nodeAffinity", "podAffinity", "podAntiAffinity"});
    if (!affinity.IsMap()) return;
    if (auto node_affinity = affinity["nodeAffinity"]) parse_node_affinity(node_affinity, spec);
    if (auto pod = affinity["podAffinity"]) parse_pod_affinity(pod, Polarity::affinity, spec, "podAffinity");
    if (auto anti = affinity["podAntiAffinity"]) {
      parse_pod_affinity(anti, Polarity::anti_affinity, spec, "podAntiAffinity");
    }
  }

  // One equality expression: In/NotIn with a single value.
  std::optional<AffinityRule> node_expression(const YAML::Node& e, const std::string& where) {
    check_keys(e, where, {"key", "operator", "values"});
    if (!e.IsMap() || !e["key"] || !e["operator"]) {
      unsupported(where + " without key/operator");
      return std::nullopt;
    }
    const auto op = scalar(e["operator"], "operator");
    if (op != "In" && op != "NotIn") {
      unsupported(fmt::format("{} operator '{}'", where, op));
      return std::nullopt;
    }
    const auto values = e["values"];
    if (!values || !values.IsSequence() || values.size() != 1) {
      unsupported(fmt::format("{} with {} values (only single-value equality is supported)", where,
                              values && values.IsSequence() ? values.size() : 0));
      return std::nullopt;
    }
    AffinityRule rule;
    rule.kind = RuleKind::node;
    rule.polarity = op == "In" ? Polarity::affinity : Polarity::anti_affinity;
    rule.key = universe_.intern_key(scalar(e["key"], "key"), LabelKind::node);
    rule.value = universe_.intern_value(rule.key, scalar(values[0], "value"));
    return rule;
  }

  void parse_node_affinity(const YAML::Node& node_affinity, AppSpec& spec) {
    const std::string where = "spec.affinity.nodeAffinity";
    check_keys(node_affinity, where, {kRequired, kPreferred});
    if (!node_affinity.IsMap()) return;
    if (auto required = node_affinity[kRequired]) {
      check_keys(required, where + ".required", {"nodeSelectorTerms"});
      auto terms = required["nodeSelectorTerms"];
      if (!terms || !terms.IsSequence()) {
        unsupported(where + ".required without nodeSelectorTerms");
      } else if (terms.size() > 1) {
        unsupported(where + ".required with more than one nodeSelectorTerm (OR of terms)");
      } else if (terms.size() == 1) {
        check_keys(terms[0], where + ".nodeSelectorTerms[0]", {"matchExpressions"});
        if (terms[0].IsMap()) {
          for (const auto& e : terms[0]["matchExpressions"]) {
            if (auto rule = node_expression(e, where + ".matchExpressions[]")) {
              rule->strength = Strength::required;
              spec.rules.push_back(*rule);
            }
          }
        }
      }
    }
    if (auto preferred = node_affinity[kPreferred]) {
      if (!preferred.IsSequence()) {
        unsupported(where + ".preferred is not a list");
        return;
      }
      for (const auto& term : preferred) {
        check_keys(term, where + ".preferred[]", {"weight", "preference"});
        auto expressions = term["preference"]["matchExpressions"];
        if (!expressions || !expressions.IsSequence() || expressions.size() != 1) {
          unsupported(where + ".preferred[] term must hold exactly one matchExpression");
          continue;
        }
        if (auto rule = node_expression(expressions[0], where + ".preferred[].matchExpressions[]")) {
          rule->strength = Strength::preferred;
          spec.rules.push_back(*rule);
        }
      }
    }
  }

  std::optional<AffinityRule> pod_term(const YAML::Node& term, const std::string& where) {
    check_keys(term, where, {"labelSelector", "topologyKey"});
    if (!term.IsMap()) return std::nullopt;
    if (!term["topologyKey"] || scalar(term["topologyKey"], "topologyKey") != options_.topology_key) {
      unsupported(fmt::format("{} topologyKey other than '{}'", where, options_.topology_key));
      return std::nullopt;
    }
    const auto selector = term["labelSelector"];
    if (!selector || !selector.IsMap()) {
      unsupported(where + " without labelSelector");
      return std::nullopt;
    }
    check_keys(selector, where + ".labelSelector", {"matchLabels", "matchExpressions"});
    std::vector<std::pair<std::string, std::string>> pairs;
    if (auto labels = selector["matchLabels"]) {
      for (const auto& entry : labels) {
        pairs.emplace_back(entry.first.as<std::string>(), scalar(entry.second, "matchLabels value"));
      }
    }
    if (auto expressions = selector["matchExpressions"]) {
      for (const auto& e : expressions) {
        const auto op = e["operator"] ? scalar(e["operator"], "operator") : std::string();
        const auto values = e["values"];
        if (op != "In" || !values || !values.IsSequence() || values.size() != 1 || !e["key"]) {
          unsupported(fmt::format("{}.labelSelector expression with operator '{}' (only single-value In)",
                                  where, op));
          continue;
        }
        pairs.emplace_back(scalar(e["key"], "key"), scalar(values[0], "value"));
      }
    }
    if (pairs.size() != 1) {
      unsupported(fmt::format("{}.labelSelector selecting {} labels (exactly one supported)", where,
                              pairs.size()));
      return std::nullopt;
    }
    AffinityRule rule;
    rule.kind = RuleKind::inter_app;
    rule.key = intern_pod_key(pairs[0].first);
    rule.value = universe_.intern_value(rule.key, pairs[0].second);
    return rule;
  }

  void parse_pod_affinity(const YAML::Node& section, Polarity polarity, AppSpec& spec,
                          const std::string& name) {
    const std::string where = "spec.affinity." + name;
    check_keys(section, where, {kRequired, kPreferred});
    if (!section.IsMap()) return;
    if (auto required = section[kRequired]) {
      for (const auto& term : required) {
        if (auto rule = pod_term(term, where + ".required[]")) {
          rule->polarity = polarity;
          rule->strength = Strength::required;
          spec.rules.push_back(*rule);
        }
      }
    }
    if (auto preferred = section[kPreferred]) {
      for (const auto& weighted : preferred) {
        check_keys(weighted, where + ".preferred[]", {"weight", "podAffinityTerm"});
        if (!weighted.IsMap()) continue;
        if (auto rule = pod_term(weighted["podAffinityTerm"], where + ".preferred[].podAffinityTerm")) {
          rule->polarity = polarity;
          rule->strength = Strength::preferred;
          spec.rules.push_back(*rule);
        }
      }
    }
  }

  LabelUniverse& universe_;
  const ManifestOptions& options_;
  std::vector<std::string> problems_;
};

}  // namespace

std::string to_pod_manifest(const AppSpec& spec, const LabelUniverse& universe,
                            const ManifestOptions& options) {
  return Emitter(universe, options).emit(spec);
}

AppSpec parse_pod_manifest(std::string_view document, LabelUniverse& universe,
                           const ManifestOptions& options) {
  return Parser(universe, options).parse(document);
}

}  // namespace colosim
