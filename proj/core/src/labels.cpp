#include "colosim/labels.hpp"

#include <algorithm>
#include <stdexcept>

namespace colosim {

std::string_view to_string(LabelKind kind) {
  switch (kind) {
    case LabelKind::node: return "node";
    case LabelKind::app: return "app";
    case LabelKind::spreading: return "spreading";
  }
  return "unknown";
}

LabelKey LabelUniverse::add_key(std::string name, LabelKind kind,
                                std::vector<std::string> domain) {
  if (key_index_.contains(name)) {
    throw std::invalid_argument("duplicate label key: " + name);
  }
  KeyInfo info{name, kind, domain.size(), {}, {}};
  for (auto& v : domain) {
    if (info.value_index.contains(v)) {
      throw std::invalid_argument("duplicate value '" + v + "' for key " + name);
    }
    info.value_index.emplace(v, static_cast<LabelValue>(info.values.size()));
    info.values.push_back(std::move(v));
  }
  const auto key = static_cast<LabelKey>(keys_.size());
  key_index_.emplace(name, key);
  keys_.push_back(std::move(info));
  return key;
}

LabelKey LabelUniverse::intern_key(std::string_view name, LabelKind kind) {
  if (auto found = find_key(name)) return *found;
  return add_key(std::string(name), kind, {});
}

LabelValue LabelUniverse::intern_value(LabelKey key, std::string_view value) {
  if (auto found = find_value(key, value)) return *found;
  auto& info = keys_.at(key);
  const auto id = static_cast<LabelValue>(info.values.size());
  info.values.emplace_back(value);
  info.value_index.emplace(std::string(value), id);
  return id;
}

std::optional<LabelKey> LabelUniverse::find_key(std::string_view name) const {
  auto it = key_index_.find(std::string(name));
  if (it == key_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<LabelValue> LabelUniverse::find_value(LabelKey key,
                                                    std::string_view value) const {
  const auto& idx = info(key).value_index;
  auto it = idx.find(std::string(value));
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

const LabelUniverse::KeyInfo& LabelUniverse::info(LabelKey key) const {
  if (key >= keys_.size()) throw std::out_of_range("unknown label key id");
  return keys_[key];
}

const std::string& LabelUniverse::key_name(LabelKey key) const { return info(key).name; }

const std::string& LabelUniverse::value_name(LabelKey key, LabelValue value) const {
  const auto& values = info(key).values;
  if (value >= values.size()) {
    throw std::out_of_range("unknown value id for key " + info(key).name);
  }
  return values[value];
}

LabelKind LabelUniverse::kind(LabelKey key) const { return info(key).kind; }

std::size_t LabelUniverse::domain_size(LabelKey key) const { return info(key).domain_size; }

std::vector<LabelKey> LabelUniverse::keys_of(LabelKind kind) const {
  std::vector<LabelKey> out;
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].kind == kind) out.push_back(static_cast<LabelKey>(i));
  }
  return out;
}

std::optional<LabelKey> LabelUniverse::spreading_key() const {
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    if (keys_[i].kind == LabelKind::spreading) return static_cast<LabelKey>(i);
  }
  return std::nullopt;
}

LabelMap::LabelMap(std::initializer_list<Entry> entries) {
  for (const auto& [k, v] : entries) set(k, v);
}

void LabelMap::set(LabelKey key, LabelValue value) {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), key,
                             [](const Entry& e, LabelKey k) { return e.first < k; });
  if (it != entries_.end() && it->first == key) {
    it->second = value;
  } else {
    entries_.insert(it, {key, value});
  }
}

void LabelMap::erase(LabelKey key) {
  std::erase_if(entries_, [key](const Entry& e) { return e.first == key; });
}

std::optional<LabelValue> LabelMap::get(LabelKey key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
    if (k > key) break;
  }
  return std::nullopt;
}

bool LabelMap::has(LabelKey key, LabelValue value) const {
  auto v = get(key);
  return v && *v == value;
}

}  // namespace colosim
