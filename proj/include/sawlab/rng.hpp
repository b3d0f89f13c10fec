// rng.hpp
// Seedable, splittable pseudo-random generators for reproducible parallel
// chains: splitmix64 for seed derivation, xoshiro256++ for the streams.
// Bounded draws avoid std::uniform_int_distribution so that streams are
// identical across standard library implementations.
#pragma once

#include <array>
#include <cstdint>

namespace saw {

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

// Child seed for chain `chain_id`: counter-based walk down a splitmix stream,
// so chains never share state and adding chains never perturbs earlier ones.
inline std::uint64_t child_seed(std::uint64_t master_seed, std::uint32_t chain_id) {
    SplitMix64 sm{master_seed};
    std::uint64_t v = 0;
    for (std::uint32_t i = 0; i <= chain_id; ++i) v = sm.next();
    return v;
}

// xoshiro256++ (Blackman & Vigna), period 2^256 - 1.
class Xoshiro256pp {
public:
    Xoshiro256pp() : Xoshiro256pp(0) {}

    explicit Xoshiro256pp(std::uint64_t seed) {
        SplitMix64 sm{seed};
        for (auto& w : s_) w = sm.next();
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, n), n >= 1. Lemire's multiply-with-rejection.
    std::uint64_t bounded(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>(next()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>(next()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    const std::array<std::uint64_t, 4>& state() const { return s_; }
    void set_state(const std::array<std::uint64_t, 4>& s) { s_ = s; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace saw
