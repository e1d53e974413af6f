#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace colosim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

struct SweepOptions {
  std::filesystem::path config;
  std::string grid;
  int jobs = 1;
  std::filesystem::path out;
};

struct AttackGenOptions {
  std::filesystem::path victim;
  int k = 1;
  bool spread = true;
  std::optional<std::uint64_t> seed;
  double noise = 0.0;
  std::filesystem::path out;
};

// Falls back to COLOSIM_SEED when no explicit seed was given.
std::optional<std::uint64_t> seed_from_env();

// Each command reports diagnostics on `err` and returns an exit status.
int cmd_run(const RunOptions& options, std::ostream& err);
int cmd_sweep(const SweepOptions& options, std::ostream& err);
int cmd_attack_gen(const AttackGenOptions& options, std::ostream& err);

}  // namespace colosim::cli
