#pragma once

#include <cstdint>
#include <random>

namespace direx {

// Deterministic uniform source.  mt19937_64 output is pinned by the standard,
// and we do the bits-to-double conversion ourselves instead of going through
// std::uniform_real_distribution (whose algorithm is implementation-defined),
// so the same seed produces the same stream on every platform and compiler.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform draw in the open interval (0, 1).  The +0.5 offset keeps the
    // value away from both endpoints so it can be pushed through quantile
    // functions that blow up at 0 and 1.
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Integer in [0, bound) via rejection-free modulo of a 64-bit draw; the
    // bias is ~bound/2^64 which is irrelevant for the small bounds we use.
    std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

    // Stable per-index substream seed.  SplitMix64 finalizer applied to the
    // base seed xor a spread-out index, so neighbouring indices land far
    // apart in seed space.
    static std::uint64_t derive(std::uint64_t base, std::uint64_t index) {
        std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace direx
