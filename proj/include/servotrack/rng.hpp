#ifndef SERVOTRACK_RNG_HPP
#define SERVOTRACK_RNG_HPP

#include <cstdint>
#include <random>

namespace servotrack {

/// splitmix64 finalizer; used to decorrelate derived stream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Deterministic per-(stream, step, index) engine so parallel particle
/// evaluation draws the same numbers regardless of thread count.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t step, std::uint64_t index) {
    std::uint64_t s = mix64(seed ^ mix64(stream));
    s = mix64(s ^ mix64(step + 0x51ed2701ULL));
    s = mix64(s ^ mix64(index + 0xabcd1234ULL));
    return std::mt19937_64(s);
}

}  // namespace servotrack

#endif
