// rng.hpp -- keyed counter-based hashing and a fast stream generator.
//
// Environments are realized as pure functions of (seed, site): repeated
// queries must return bit-identical values, and walkers running in
// parallel must be able to derive independent streams from a master seed
// without coordination. Both needs are served by a stateless keyed hash
// (splitmix64 finalizer rounds over the key and the site coordinates)
// plus xoshiro256** for the sequential per-walker streams.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace rwre::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer: full-avalanche 64-bit mix.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Keyed hash of an integer coordinate tuple. One finalizer round per
// coordinate keeps full avalanche between the key and every coordinate.
constexpr std::uint64_t hash_coords(std::uint64_t key, std::span<const std::int64_t> coords) {
    std::uint64_t h = mix64(key + kGolden);
    for (std::int64_t c : coords) {
        h ^= mix64(static_cast<std::uint64_t>(c) + kGolden);
        h = mix64(h + kGolden);
    }
    return h;
}

constexpr std::uint64_t hash2(std::uint64_t key, std::int64_t a) {
    const std::int64_t c[1] = {a};
    return hash_coords(key, std::span<const std::int64_t>(c, 1));
}

constexpr std::uint64_t hash3(std::uint64_t key, std::int64_t a, std::int64_t b) {
    const std::int64_t c[2] = {a, b};
    return hash_coords(key, std::span<const std::int64_t>(c, 2));
}

// 53-bit uniform in [0, 1).
constexpr double to_unit(std::uint64_t h) {
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

constexpr double unit_at(std::uint64_t key, std::int64_t site) {
    return to_unit(hash2(key, site));
}

// xoshiro256**: the per-walker stream generator. Seeded through splitmix64
// so that any 64-bit value (including 0) gives a valid state.
class Xoshiro256ss {
  public:
    Xoshiro256ss() : Xoshiro256ss(0) {}
    explicit Xoshiro256ss(std::uint64_t seed) { reseed(seed); }

    void reseed(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x += kGolden;
            word = mix64(x);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5ull, 7) * 9ull;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return to_unit(next_u64()); }

    // Unbiased integer in [0, bound).
    std::uint64_t uniform_below(std::uint64_t bound) {
        const std::uint64_t reject = -bound % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x < reject);
        return x % bound;
    }

    // Standard normal via Marsaglia polar; used only in synthetic test data
    // and bootstrap plumbing, never in walk kernels.
    double gaussian() {
        double u, v, r2;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            r2 = u * u + v * v;
        } while (r2 >= 1.0 || r2 == 0.0);
        return u * std::sqrt(-2.0 * std::log(r2) / r2);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> s_{};
};

// Derived sub-seeds: walker k of a master-seeded experiment draws its
// environment and walk seeds as independent hash streams, so any walker is
// replayable in isolation and results do not depend on scheduling.
inline std::uint64_t derive_seed(std::uint64_t master, std::int64_t index, std::int64_t lane) {
    return hash3(master, index, lane);
}

}  // namespace rwre::rng
