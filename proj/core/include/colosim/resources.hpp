#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

namespace colosim {

/// Multi-dimensional resource quantity. Memory is counted in 512 MB units
/// and disk in 16 MB units.
struct ResourceVector {
  std::int64_t cpu_cores = 0;
  std::int64_t memory = 0;
  std::int64_t disk = 0;
  std::int64_t network_ports = 0;

  static constexpr std::size_t kDimensions = 4;

  constexpr std::array<std::int64_t, kDimensions> as_array() const {
    return {cpu_cores, memory, disk, network_ports};
  }

  /// Component-wise a <= b.
  constexpr bool fits_in(const ResourceVector& other) const {
    return cpu_cores <= other.cpu_cores && memory <= other.memory &&
           disk <= other.disk && network_ports <= other.network_ports;
  }

  constexpr bool non_negative() const {
    return cpu_cores >= 0 && memory >= 0 && disk >= 0 && network_ports >= 0;
  }

  constexpr ResourceVector& operator+=(const ResourceVector& o) {
    cpu_cores += o.cpu_cores;
    memory += o.memory;
    disk += o.disk;
    network_ports += o.network_ports;
    return *this;
  }

  constexpr ResourceVector& operator-=(const ResourceVector& o) {
    cpu_cores -= o.cpu_cores;
    memory -= o.memory;
    disk -= o.disk;
    network_ports -= o.network_ports;
    return *this;
  }

  friend constexpr ResourceVector operator+(ResourceVector a, const ResourceVector& b) {
    return a += b;
  }
  friend constexpr ResourceVector operator-(ResourceVector a, const ResourceVector& b) {
    return a -= b;
  }
  friend constexpr bool operator==(const ResourceVector&, const ResourceVector&) = default;

  std::string to_string() const;
};

/// Smallest request any instance may make; attack instances always use it.
inline constexpr ResourceVector kMinimumRequest{1, 1, 1, 1};

inline constexpr std::int64_t kMemoryUnitMiB = 512;
inline constexpr std::int64_t kDiskUnitMiB = 16;

}  // namespace colosim
