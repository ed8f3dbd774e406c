#pragma once

#include <cstdint>
#include <random>

namespace parmimo {

// Independent random streams used by one Monte-Carlo trial.
enum class Stream : std::uint64_t { Channel = 1, Symbols = 2, Aux = 3 };

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Seed of the substream for (master seed, trial index, stream); stable across
// platforms and independent of scheduling order.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, Stream stream) noexcept;

using Engine = std::mt19937_64;

Engine make_engine(std::uint64_t seed);

}  // namespace parmimo
