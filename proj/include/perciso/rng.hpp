#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace perciso {

// Counter-based hashing: every random quantity in the library is a pure
// function of (seed, domain tag, integer key), so results do not depend on
// evaluation order or thread layout.

constexpr std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

template <class... Ts>
constexpr std::uint64_t hash_key(std::uint64_t seed, Ts... keys) {
    std::uint64_t h = splitmix64(seed);
    ((h = hash_combine(h, static_cast<std::uint64_t>(keys))), ...);
    return h;
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

/// Domain tags keep edge, vertex and derived-seed streams apart.
enum class Stream : std::uint64_t {
    edge = 0x65646765,
    eta = 0x657461,
    replica = 0x7265706c,
    restart = 0x72657374,
};

/// Small sequential generator (xoshiro256**) seeded by splitmix64; used by the
/// stochastic searches where a counter-based stream would be awkward.
class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t z = seed;
        for (auto& s : state_) {
            z += 0x9e3779b97f4a7c15ULL;
            s = splitmix64(z);
        }
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    double uniform() { return to_unit((*this)()); }

    /// Integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>((*this)()) * bound) >> 64);
    }

    /// Standard normal via Box-Muller (portable, unlike std::normal_distribution).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4]{};
};

}  // namespace perciso
