#pragma once

#include <cstdint>
#include <cmath>
#include <vector>
#include <algorithm>

namespace hyperdet::rng {

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
    return splitmix64(s);
}

// Deterministic counter-free stream; portable across platforms and
// independent of libstdc++ distribution internals.
class Stream {
public:
    explicit Stream(uint64_t seed) : state_(seed) {
        // decorrelate trivially related seeds
        next_u64();
        next_u64();
    }

    // derive an independent stream keyed by (seed, tag, a, b)
    static Stream derive(uint64_t seed, uint64_t tag, uint64_t a = 0, uint64_t b = 0) {
        return Stream(mix(mix(mix(seed, tag), a), b));
    }

    uint64_t next_u64() { return splitmix64(state_); }

    // Lemire's nearly-divisionless bounded integer in [0, n)
    uint64_t bounded(uint64_t n) {
        if (n == 0) return 0;
        __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
        auto lo = static_cast<uint64_t>(m);
        if (lo < n) {
            uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<__uint128_t>(next_u64()) * n;
                lo = static_cast<uint64_t>(m);
            }
        }
        return static_cast<uint64_t>(m >> 64);
    }

    double uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

    double normal() {
        // Box-Muller, one value per call
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    // Poisson via inversion (fine for small lambda)
    uint64_t poisson(double lambda) {
        if (lambda <= 0) return 0;
        double l = std::exp(-lambda);
        double p = 1.0;
        uint64_t k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

private:
    uint64_t state_;
};

// Uniform k-subset of items, by partial Fisher-Yates. Output order is the
// shuffle order; callers wanting canonical order sort afterwards.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, size_t k, Stream& rng) {
    const size_t n = pool.size();
    if (k >= n) return pool;
    for (size_t i = 0; i < k; ++i) {
        size_t j = i + static_cast<size_t>(rng.bounded(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

}  // namespace hyperdet::rng
