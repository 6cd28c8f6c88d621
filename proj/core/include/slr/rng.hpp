#pragma once

#include <cstdint>
#include <random>

namespace slr {

// All randomness in the library goes through these helpers instead of
// std::<distribution> types, whose output is implementation defined.
// mt19937_64 plus the mappings below give bit-identical streams on every
// platform, which the reproducibility guarantees depend on.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derive an independent sub-stream seed from (seed, index). Used so that
/// per-item generation (one rectangle, one worker) is independent of
/// scheduling order. The mixing function is frozen; changing it changes
/// every seeded output.
inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ull * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = -n % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = engine_();
            if (r >= threshold) return r % n;
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace slr
