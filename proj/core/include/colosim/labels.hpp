#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace colosim {

using LabelKey = std::uint16_t;
using LabelValue = std::uint32_t;

enum class LabelKind { node, app, spreading };

std::string_view to_string(LabelKind kind);

/// Registry of label keys and their value names.
///
/// Each key has an admissible value domain used by the generators (the first
/// `domain_size` values). Values interned later (parsed manifests, attacker
/// spreading values) are appended after the domain and never generated.
class LabelUniverse {
 public:
  LabelKey add_key(std::string name, LabelKind kind, std::vector<std::string> domain);

  // Returns the existing key when `name` is known, regardless of kind.
  LabelKey intern_key(std::string_view name, LabelKind kind);
  LabelValue intern_value(LabelKey key, std::string_view value);

  std::optional<LabelKey> find_key(std::string_view name) const;
  std::optional<LabelValue> find_value(LabelKey key, std::string_view value) const;

  const std::string& key_name(LabelKey key) const;
  const std::string& value_name(LabelKey key, LabelValue value) const;
  LabelKind kind(LabelKey key) const;
  std::size_t domain_size(LabelKey key) const;

  std::size_t key_count() const { return keys_.size(); }
  std::vector<LabelKey> keys_of(LabelKind kind) const;

  // The reserved attacker key; only valid when one was registered.
  std::optional<LabelKey> spreading_key() const;

 private:
  struct KeyInfo {
    std::string name;
    LabelKind kind;
    std::size_t domain_size;
    std::vector<std::string> values;
    std::unordered_map<std::string, LabelValue> value_index;
  };

  const KeyInfo& info(LabelKey key) const;

  std::vector<KeyInfo> keys_;
  std::unordered_map<std::string, LabelKey> key_index_;
};

/// At most one value per key; an absent key means the label is missing.
class LabelMap {
 public:
  using Entry = std::pair<LabelKey, LabelValue>;

  LabelMap() = default;
  LabelMap(std::initializer_list<Entry> entries);

  void set(LabelKey key, LabelValue value);
  void erase(LabelKey key);
  std::optional<LabelValue> get(LabelKey key) const;
  bool has(LabelKey key, LabelValue value) const;

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const LabelMap&, const LabelMap&) = default;

 private:
  std::vector<Entry> entries_;  // sorted by key
};

inline std::uint64_t pack_label(LabelKey key, LabelValue value) {
  return (static_cast<std::uint64_t>(key) << 32) | value;
}

}  // namespace colosim
