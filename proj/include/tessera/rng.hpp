#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace tessera {

// xoshiro256** (Blackman & Vigna), seeded through splitmix64. The whole
// generator is four 64-bit words, so it serializes exactly into snapshots.
class Rng {
public:
    using result_type = std::uint64_t;
    using State = std::array<std::uint64_t, 4>;

    Rng() : Rng(0) {}

    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            word = splitmix64(x);
        }
    }

    static Rng from_state(const State& state) {
        Rng rng;
        rng.s_ = state;
        return rng;
    }

    const State& state() const noexcept { return s_; }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next(); }

    result_type next() noexcept {
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

    /// Uniform real in [0, 1) from the top 53 bits of one draw.
    double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Rejection sampling, so a call may consume
    /// more than one draw; bound == 0 returns 0 without drawing.
    std::uint64_t below(std::uint64_t bound) noexcept {
        if (bound == 0) {
            return 0;
        }
        const std::uint64_t limit = max() - (max() % bound + 1) % bound;
        std::uint64_t x = next();
        while (x > limit) {
            x = next();
        }
        return x % bound;
    }

    /// One draw, regardless of p. p >= 1 always succeeds, p <= 0 never does.
    bool bernoulli(double p) noexcept { return uniform() < p; }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    static constexpr std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    State s_{};
};

}  // namespace tessera
