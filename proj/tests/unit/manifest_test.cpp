#include <gtest/gtest.h>

#include <algorithm>
#include <tuple>

#include "colosim/attack.hpp"
#include "colosim/cluster.hpp"
#include "colosim/errors.hpp"
#include "colosim/manifest.hpp"

namespace colosim {
namespace {

void canonicalize(AppSpec& spec) {
  std::sort(spec.rules.begin(), spec.rules.end(), [](const AffinityRule& a, const AffinityRule& b) {
    return std::tuple(a.kind, a.strength, a.polarity, a.key, a.value) <
           std::tuple(b.kind, b.strength, b.polarity, b.key, b.value);
  });
}

constexpr const char* kMinimalPod = R"(apiVersion: v1
kind: Pod
metadata:
  name: colosim-normal-5
  annotations:
    colosim.io/instance-id: "5"
    colosim.io/role: normal
    colosim.io/submit-slot: "2"
    colosim.io/lifetime-slots: "30"
spec:
  containers:
    - name: main
      image: nginx
      resources:
        requests:
          cpu: "2"
          memory: 1Gi
          ephemeral-storage: 48Mi
          colosim.io/network-ports: "3"
)";

TEST(Manifest, RoundTripsRandomSpecs) {
  LabelUniverse universe = make_label_universe(ClusterGenConfig{});
  WorkloadConfig config;
  Rng rng(31);
  for (std::uint64_t i = 1; i <= 1000; ++i) {
    config.p_mn = uniform01(rng);
    config.p_ma = uniform01(rng);
    AppSpec spec = generate_app_spec(config, universe, rng, InstanceId{i}, static_cast<int>(i % 50));
    if (i % 3 == 0) {
      AttackConfig attack;
      attack.instance_count = 2;
      const SpreadingLabel spread{*universe.spreading_key(),
                                  universe.intern_value(*universe.spreading_key(), "nu-" + std::to_string(i))};
      spec = repttack_specs(spec, attack, spread, rng)[0];
      spec.id = InstanceId{i};
    }
    const auto text = to_pod_manifest(spec, universe);
    AppSpec parsed = parse_pod_manifest(text, universe);
    canonicalize(spec);
    ASSERT_EQ(parsed, spec) << text;
    ASSERT_EQ(to_pod_manifest(parsed, universe), to_pod_manifest(spec, universe));
  }
}

TEST(Manifest, ParsesHandWrittenPod) {
  LabelUniverse universe;
  const auto spec = parse_pod_manifest(kMinimalPod, universe);
  EXPECT_EQ(spec.id, InstanceId{5});
  EXPECT_EQ(spec.role, Role::normal);
  EXPECT_EQ(spec.submit_slot, 2);
  EXPECT_EQ(spec.lifetime_slots, 30);
  EXPECT_EQ(spec.request, (ResourceVector{2, 2, 3, 3}));
  EXPECT_TRUE(spec.rules.empty());
}

TEST(Manifest, NoAffinityStanzaWithoutRules) {
  LabelUniverse universe = make_label_universe(ClusterGenConfig{});
  AppSpec spec;
  spec.id = InstanceId{4};
  const auto text = to_pod_manifest(spec, universe);
  EXPECT_EQ(text.find("affinity"), std::string::npos);
  EXPECT_NE(text.find("colosim-normal-4"), std::string::npos);
  EXPECT_NE(text.find("colosim.io/network-ports"), std::string::npos);
}

TEST(Manifest, NumericLookingStringsAreQuoted) {
  LabelUniverse universe;
  const auto k = universe.add_key("version", LabelKind::app, {"3", "true", "v1"});
  AppSpec spec;
  spec.id = InstanceId{12};
  spec.own_labels.set(k, 0);
  spec.rules = {AffinityRule{RuleKind::inter_app, Polarity::affinity, Strength::preferred, k, 1}};
  const auto text = to_pod_manifest(spec, universe);
  EXPECT_NE(text.find("version: \"3\""), std::string::npos) << text;
  EXPECT_NE(text.find("version: \"true\""), std::string::npos) << text;
  EXPECT_NE(text.find("colosim.io/instance-id: \"12\""), std::string::npos) << text;
  EXPECT_NE(text.find("weight: 50\n"), std::string::npos) << text;
  EXPECT_EQ(parse_pod_manifest(text, universe), spec);
}

TEST(Manifest, AttackCarriesSpreadingTerm) {
  LabelUniverse universe = make_label_universe(ClusterGenConfig{});
  const auto key = *universe.spreading_key();
  AttackConfig attack;
  attack.instance_count = 3;
  Rng rng(1);
  AppSpec victim;
  auto spec = repttack_specs(victim, attack, {key, universe.intern_value(key, "nu-0")}, rng)[0];
  spec.id = InstanceId{9};
  const auto text = to_pod_manifest(spec, universe);
  EXPECT_NE(text.find("podAntiAffinity"), std::string::npos);
  EXPECT_NE(text.find("colosim.io/spread: nu-0"), std::string::npos);
  EXPECT_NE(text.find("kubernetes.io/hostname"), std::string::npos);
  EXPECT_NE(text.find("colosim-attack-9"), std::string::npos);
}

TEST(Manifest, UnknownLabelsAreExportErrors) {
  LabelUniverse universe;
  AppSpec spec;
  spec.own_labels.set(3, 0);
  EXPECT_THROW(to_pod_manifest(spec, universe), ExportError);
  spec = {};
  spec.request.cpu_cores = -1;
  EXPECT_THROW(to_pod_manifest(spec, universe), ExportError);
  ManifestOptions options;
  options.preferred_weight = 0;
  EXPECT_THROW(to_pod_manifest(AppSpec{}, universe, options), ExportError);
  options = {};
  options.images.clear();
  EXPECT_THROW(to_pod_manifest(AppSpec{}, universe, options), ExportError);
}

std::string with_spec_extra(const std::string& extra) {
  return std::string(kMinimalPod) + extra;
}

void expect_parse_error(const std::string& text, const std::string& fragment) {
  LabelUniverse universe;
  try {
    parse_pod_manifest(text, universe);
    FAIL() << "expected ParseError mentioning '" << fragment << "'";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(Manifest, RejectsUnsupportedConstructs) {
  expect_parse_error(with_spec_extra("  nodeSelector:\n    disk: ssd\n"), "nodeSelector");
  expect_parse_error(with_spec_extra("  tolerations: []\n"), "tolerations");
  expect_parse_error(with_spec_extra(R"(  affinity:
    nodeAffinity:
      requiredDuringSchedulingIgnoredDuringExecution:
        nodeSelectorTerms:
          - matchExpressions:
              - {key: zone, operator: Exists}
)"),
                     "operator 'Exists'");
  expect_parse_error(with_spec_extra(R"(  affinity:
    nodeAffinity:
      requiredDuringSchedulingIgnoredDuringExecution:
        nodeSelectorTerms:
          - matchExpressions:
              - {key: zone, operator: In, values: [a]}
          - matchExpressions:
              - {key: zone, operator: In, values: [b]}
)"),
                     "more than one nodeSelectorTerm");
  expect_parse_error(with_spec_extra(R"(  affinity:
    nodeAffinity:
      requiredDuringSchedulingIgnoredDuringExecution:
        nodeSelectorTerms:
          - matchExpressions:
              - {key: zone, operator: In, values: [a, b]}
)"),
                     "2 values");
  expect_parse_error(with_spec_extra(R"(  affinity:
    podAffinity:
      requiredDuringSchedulingIgnoredDuringExecution:
        - labelSelector:
            matchLabels: {app: web}
          topologyKey: topology.kubernetes.io/zone
)"),
                     "topologyKey");
  expect_parse_error(with_spec_extra(R"(  affinity:
    podAffinity:
      requiredDuringSchedulingIgnoredDuringExecution:
        - labelSelector:
            matchLabels: {app: web, tier: db}
          topologyKey: kubernetes.io/hostname
)"),
                     "2 labels");
}

TEST(Manifest, ListsEveryProblem) {
  LabelUniverse universe;
  try {
    parse_pod_manifest(with_spec_extra("  nodeSelector: {a: b}\n  tolerations: []\n"), universe);
    FAIL();
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("nodeSelector"), std::string::npos);
    EXPECT_NE(what.find("tolerations"), std::string::npos);
  }
}

TEST(Manifest, RejectsMalformedDocuments) {
  LabelUniverse universe;
  EXPECT_THROW(parse_pod_manifest("[1, 2", universe), ParseError);
  EXPECT_THROW(parse_pod_manifest("- a\n- b\n", universe), ParseError);
  EXPECT_THROW(parse_pod_manifest("apiVersion: v1\nkind: Deployment\nspec: {}\n", universe),
               ParseError);
  std::string fractional = kMinimalPod;
  fractional.replace(fractional.find("cpu: \"2\""), 8, "cpu: 500m");
  EXPECT_THROW(parse_pod_manifest(fractional, universe), ParseError);
  std::string milli = kMinimalPod;
  milli.replace(milli.find("cpu: \"2\""), 8, "cpu: 2000m");
  EXPECT_EQ(parse_pod_manifest(milli, universe).request.cpu_cores, 2);
}

}  // namespace
}  // namespace colosim
