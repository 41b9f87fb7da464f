#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace pavi {

/// Seeded PRNG with explicit sampling transforms.
///
/// All distributions are implemented here (not via <random> distribution
/// objects, whose output is implementation-defined), so a given seed produces
/// the same stream on every platform. Sub-streams are derived by hashing the
/// parent seed with an index path, which makes replication r of a batch
/// identical whether run alone or together with the others.
/// Seed for an independent sub-stream addressed by (seed, i0, i1, ...).
uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path);

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(mix(seed)) {}

    /// Independent stream addressed by (seed, i0, i1, ...).
    static Rng derive(uint64_t seed, std::initializer_list<uint64_t> path) {
        return Rng(derive_seed(seed, path));
    }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Unbiased integer in [0, n) by rejection.
    uint64_t below(uint64_t n) {
        if (n <= 1) return 0;
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    friend uint64_t derive_seed(uint64_t, std::initializer_list<uint64_t>);

    // splitmix64 finalizer; also used as the seed scrambler.
    static uint64_t mix(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    std::mt19937_64 gen_;
};

inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
    uint64_t s = Rng::mix(seed);
    for (uint64_t idx : path) s = Rng::mix(s ^ Rng::mix(idx + 0x9e3779b97f4a7c15ULL));
    return s;
}

}  // namespace pavi
