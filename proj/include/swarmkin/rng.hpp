// Deterministic RNG plumbing. Two mechanisms, both fixed per release:
//
//  * Counter-based draws for the agent simulation: the uniform used by agent i
//    at step n is a pure function of (seed, n, i), so trajectories are
//    bit-reproducible across platforms and relabelling agents while carrying
//    their draw keys along leaves the dynamics identical.
//  * Per-replicate mt19937_64 streams for Monte Carlo estimators: replicate k
//    gets an engine seeded from (seed, k), so replicates can run on any number
//    of workers and merge by value.
//
// Uniforms are built as (x >> 11) * 2^-53 to avoid implementation-defined
// std::uniform_real_distribution behaviour.
#pragma once

#include <cstdint>
#include <random>

namespace swarmkin {

// Fmix from the splitmix64 generator; a full-avalanche 64->64 bijection.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Two-level key mix; distinct (a,b) pairs give decorrelated outputs.
inline std::uint64_t mix2(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix3(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return splitmix64(mix2(a, b) ^ (c + 0x94d049bb133111ebULL));
}

// Uniform double in [0, 1) from 53 high bits.
inline double u01(std::uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

inline double counter_u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t ctr) {
    return u01(mix3(seed, stream, ctr));
}

// Independent engine for replicate k of the stream family `tag`.
inline std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t tag, std::uint64_t k) {
    return std::mt19937_64(mix3(seed, tag, k));
}

inline double draw_u01(std::mt19937_64& eng) { return u01(eng()); }

} // namespace swarmkin
