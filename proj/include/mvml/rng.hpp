/**
 * rng.hpp — seeded random number generation for reproducible Monte Carlo.
 *
 * Core generator is xoshiro256++ (Blackman & Vigna), seeded through a
 * splitmix64 expansion so that any 64-bit seed yields a well-mixed state.
 * Independent streams are derived from (seed, label) pairs, where the label
 * is a human-readable string such as "table3/K=10/rep=17/model".  Stream
 * derivation hashes the label (FNV-1a) into the splitmix chain, so streams
 * for different labels are statistically independent and a replicate's
 * stream depends only on its own label — never on execution order.
 *
 * Normal variates use the Box–Muller transform (pair-cached).  The
 * reproducibility contract is bit-identical sequences for a fixed seed on a
 * fixed build/platform, and statistical equivalence across platforms.
 */
#ifndef MVML_RNG_HPP
#define MVML_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace mvml {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

class Rng {
public:
    /// Stream for a bare seed.
    explicit Rng(std::uint64_t seed) { seed_state(seed, 0); }

    /// Independent stream for (seed, label).
    Rng(std::uint64_t seed, std::string_view label) {
        seed_state(seed, detail::fnv1a64(label));
    }

    /// xoshiro256++ step.
    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = detail::rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box–Muller; generates pairs and caches one.
    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        // u1 in (0, 1] keeps log(u1) finite.
        const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
#if defined(__GLIBC__)
        double s, c;
        ::sincos(angle, &s, &c);
#else
        const double s = std::sin(angle);
        const double c = std::cos(angle);
#endif
        cached_ = r * s;
        has_cached_ = true;
        return r * c;
    }

    /// Uniform integer in {0, ..., n-1}; unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Fisher–Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

private:
    void seed_state(std::uint64_t seed, std::uint64_t label_hash) {
        std::uint64_t sm = seed ^ (label_hash * 0x9e3779b97f4a7c15ULL);
        for (auto& word : s_) word = detail::splitmix64(sm);
        // xoshiro must not start from the all-zero state.
        if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::array<std::uint64_t, 4> s_{};
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace mvml

#endif  // MVML_RNG_HPP
