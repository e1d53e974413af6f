#include <gtest/gtest.h>

#include "colosim/labels.hpp"

namespace colosim {
namespace {

TEST(LabelUniverse, AddAndLookUp) {
  LabelUniverse u;
  const auto k = u.add_key("zone", LabelKind::node, {"a", "b", "c"});
  EXPECT_EQ(u.key_name(k), "zone");
  EXPECT_EQ(u.kind(k), LabelKind::node);
  EXPECT_EQ(u.domain_size(k), 3u);
  EXPECT_EQ(u.find_value(k, "b"), LabelValue{1});
  EXPECT_FALSE(u.find_value(k, "d").has_value());
  EXPECT_EQ(u.find_key("zone"), k);
  EXPECT_FALSE(u.find_key("rack").has_value());
}

TEST(LabelUniverse, InternedValuesExtendPastDomain) {
  LabelUniverse u;
  const auto k = u.add_key("app", LabelKind::app, {"x"});
  const auto v = u.intern_value(k, "y");
  EXPECT_EQ(v, 1u);
  EXPECT_EQ(u.intern_value(k, "y"), v);
  EXPECT_EQ(u.domain_size(k), 1u);
  EXPECT_EQ(u.value_name(k, v), "y");
}

TEST(LabelUniverse, InternKeyKeepsExistingKind) {
  LabelUniverse u;
  const auto k = u.add_key("tier", LabelKind::node, {});
  EXPECT_EQ(u.intern_key("tier", LabelKind::app), k);
  EXPECT_EQ(u.kind(k), LabelKind::node);
  const auto fresh = u.intern_key("svc", LabelKind::app);
  EXPECT_NE(fresh, k);
  EXPECT_EQ(u.kind(fresh), LabelKind::app);
  EXPECT_EQ(u.keys_of(LabelKind::app).size(), 1u);
}

TEST(LabelUniverse, SpreadingKeyOnlyWhenRegistered) {
  LabelUniverse u;
  EXPECT_FALSE(u.spreading_key().has_value());
  const auto k = u.add_key("spread", LabelKind::spreading, {});
  EXPECT_EQ(u.spreading_key(), k);
}

TEST(LabelMap, SetGetErase) {
  LabelMap m;
  EXPECT_TRUE(m.empty());
  m.set(3, 1);
  m.set(1, 2);
  m.set(3, 4);
  EXPECT_EQ(m.size(), 2u);
  EXPECT_EQ(m.get(3), LabelValue{4});
  EXPECT_TRUE(m.has(1, 2));
  EXPECT_FALSE(m.has(1, 3));
  EXPECT_EQ(m.begin()->first, 1);
  m.erase(1);
  EXPECT_FALSE(m.get(1).has_value());
  EXPECT_EQ(m, (LabelMap{{3, 4}}));
}

TEST(LabelMap, PackLabelIsInjective) {
  EXPECT_NE(pack_label(1, 0), pack_label(0, 1));
  EXPECT_EQ(pack_label(2, 7) >> 32, 2u);
}

}  // namespace
}  // namespace colosim
