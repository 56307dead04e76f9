// Deterministic, platform-independent random streams.
//
// Generator contract: xoshiro256** seeded through splitmix64. Every draw is
// defined in terms of unsigned 64-bit arithmetic only, so identical seeds
// produce identical streams on every platform. Stream derivation for
// (seed, domain, a, b) is part of the contract: simulation replications and
// per-node-per-tick policy updates depend on it for order independence.
// Changing any of this is a breaking format change.

#pragma once

#include <cstdint>

namespace powsim {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream domains keep independent draws from ever sharing state.
enum class RngStream : std::uint64_t {
    Topology = 1,
    RoleAssignment = 2,
    Partition = 3,
    Production = 4,
    AdversaryMining = 5,
    PolicyStep = 6,
    Latency = 7,
    MismatchEstimate = 8,
    Surplus = 9,
    DelayOverlay = 10,
    Test = 99,
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) { reseed(seed, 0, 0, 0); }
    Rng(std::uint64_t seed, RngStream stream, std::uint64_t a = 0, std::uint64_t b = 0) {
        reseed(seed, static_cast<std::uint64_t>(stream), a, b);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Unbiased integer in [0, bound) via rejection on the top of the range.
    std::uint64_t uniform_u64(std::uint64_t bound) {
        if (bound <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    // Integer in [lo, hi] inclusive.
    std::uint64_t uniform_range(std::uint64_t lo, std::uint64_t hi) {
        return lo + uniform_u64(hi - lo + 1);
    }

    // Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    void reseed(std::uint64_t seed, std::uint64_t stream, std::uint64_t a, std::uint64_t b) {
        std::uint64_t sm = seed;
        sm ^= 0x632be59bd9b4e019ULL * (stream + 1);
        (void)splitmix64(sm);
        sm ^= 0x9e6c63d0876a9a35ULL * (a + 1);
        (void)splitmix64(sm);
        sm ^= 0xc2b2ae3d27d4eb4fULL * (b + 1);
        for (auto& word : s_) word = splitmix64(sm);
        // All-zero state is the one forbidden xoshiro seed.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x1ULL;
    }

    std::uint64_t s_[4];
};

} // namespace powsim
