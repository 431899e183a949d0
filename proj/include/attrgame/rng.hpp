#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace attrgame {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

// All randomness flows from one master seed through named sub-streams; cells of
// a sweep get (name, index) streams so results do not depend on thread count.
inline std::mt19937_64 substream(std::uint64_t master, std::string_view name,
                                 std::uint64_t index = 0) {
    std::uint64_t s = master ^ fnv1a(name);
    s ^= 0x9e3779b97f4a7c15ULL * (index + 1);
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace attrgame
