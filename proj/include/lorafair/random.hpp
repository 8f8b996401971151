#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace lorafair {

// Deterministic RNG utilities. std::mt19937_64 output is fixed by the
// standard, but the std distributions are not, so the draw helpers below do
// their own inverse-CDF transforms to keep runs bit-reproducible across
// toolchains.

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d9a823a8480d5dULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    // Streams are keyed so per-node sequences do not depend on the order in
    // which the engine happens to consume them.
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s ^= 0x5851f42d4c957f2dULL * (stream + 1);
        std::uint64_t b = splitmix64(s);
        s ^= 0x14057b7ef767814fULL * (substream + 1);
        std::uint64_t c = splitmix64(s);
        std::seed_seq seq{a, b, c};
        gen_.seed(seq);
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Exponential with the given mean, via inverse CDF.
    double exponential(double mean) {
        double u = uniform01();
        return -mean * std::log1p(-u);
    }

    // Standard normal via Box-Muller (std::normal_distribution is not
    // bit-portable).
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return gen_() % n; }

private:
    std::mt19937_64 gen_;
};

}  // namespace lorafair
