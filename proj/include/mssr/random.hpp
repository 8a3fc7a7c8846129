#pragma once

#include <cstdint>
#include <random>

namespace mssr {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent generator for element `index` of a run seeded with `seed`.
/// Streams depend only on (seed, index), so work can be split across threads
/// without changing results.
Rng make_stream(std::uint64_t seed, std::uint64_t index);
Rng make_stream(std::uint64_t seed, std::uint64_t index, std::uint64_t sub);

/// Derives a child seed from a parent generator.
std::uint64_t draw_seed(Rng& rng);

}  // namespace mssr
