#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mildnet/errors.hpp"

// Deterministic random streams.  Every consumer derives its own stream from
// (seed, purpose-name) so that adding draws in one place never shifts the
// values seen elsewhere.  Uniform/normal generation is hand-rolled on top of
// mt19937_64 instead of <random> distributions, which keeps the produced
// doubles identical across standard-library versions.

namespace mildnet {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Stable stream id for (seed, name).
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view name) {
    std::uint64_t state = seed ^ fnv1a64(name);
    std::uint64_t a = splitmix64(state);
    std::uint64_t b = splitmix64(state);
    return a ^ (b << 1);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    Rng(std::uint64_t seed, std::string_view stream) : engine_(derive_stream_seed(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0,1) with 53 significant bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // One standard normal via Box-Muller; two uniform draws per value so the
    // consumption pattern stays position-independent.
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::size_t index(std::size_t n) {
        require(n > 0, "Rng::index: n must be positive");
        // Rejection keeps the draw unbiased for any n.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return static_cast<std::size_t>(x % n);
    }

    // Uniform direction on the unit sphere of dimension dim, written to out.
    void unit_vector(double* out, int dim) {
        require(dim >= 1, "Rng::unit_vector: dim must be >= 1");
        double norm_sq = 0.0;
        do {
            norm_sq = 0.0;
            for (int k = 0; k < dim; ++k) {
                out[k] = normal();
                norm_sq += out[k] * out[k];
            }
        } while (norm_sq < 1e-24);
        const double inv = 1.0 / std::sqrt(norm_sq);
        for (int k = 0; k < dim; ++k) out[k] *= inv;
    }

    // Uniform point in the closed unit ball: random direction scaled by U^(1/dim).
    void ball_point(double* out, int dim) {
        unit_vector(out, dim);
        const double radius = std::pow(uniform01(), 1.0 / static_cast<double>(dim));
        for (int k = 0; k < dim; ++k) out[k] *= radius;
    }

    // k distinct indices from {0,...,n-1} via partial Fisher-Yates, sorted.
    std::vector<int> distinct_indices(int n, int k) {
        require(0 <= k && k <= n, "Rng::distinct_indices: need 0 <= k <= n");
        std::vector<int> pool(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < k; ++i) {
            const std::size_t j = i + index(static_cast<std::size_t>(n - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        std::vector<int> chosen(pool.begin(), pool.begin() + k);
        std::sort(chosen.begin(), chosen.end());
        return chosen;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace mildnet
