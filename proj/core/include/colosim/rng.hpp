#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace colosim {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) built from the top 53 bits of one draw.
double uniform01(Rng& rng);

// True with probability p. Always consumes exactly one draw, including for
// p == 0 and p == 1, so enabling a feature never shifts later draws.
bool bernoulli(Rng& rng, double p);

// Uniform index in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

// Uniform integer in the closed range [lo, hi].
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

// Independent stream seed from (master, stream) via splitmix64 mixing.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

}  // namespace colosim
