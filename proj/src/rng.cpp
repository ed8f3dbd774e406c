#include "parmimo/rng.hpp"

#include <array>

namespace parmimo {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t trial, Stream stream) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ trial);
    return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

Engine make_engine(std::uint64_t seed) {
    // Expand the 64-bit seed so nearby seeds give unrelated engine states.
    std::array<std::uint32_t, 8> words{};
    std::uint64_t state = seed;
    for (std::size_t i = 0; i < words.size(); i += 2) {
        state = splitmix64(state);
        words[i] = static_cast<std::uint32_t>(state);
        words[i + 1] = static_cast<std::uint32_t>(state >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Engine(seq);
}

}  // namespace parmimo
