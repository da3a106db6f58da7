#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

// Deterministic random generation. Everything here is fully specified so that
// a given seed produces the same stream on every platform and in every build;
// the standard library distributions are implementation-defined and therefore
// unsuitable for reproducible artifacts.

namespace causal::rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stateless sub-stream derivation: task k under a root seed gets its own
// generator seed without consuming the root stream.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t k) {
    std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (k + 1));
    return splitmix64(s);
}

class Xoshiro256 {
  public:
    explicit Xoshiro256(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
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

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

inline double uniform01(Xoshiro256& g) {
    return static_cast<double>(g.next() >> 11) * 0x1.0p-53;
}

inline double uniform(Xoshiro256& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

// Box-Muller without caching the paired draw; one normal costs two uniforms
// but the stream position stays a simple function of the draw count.
inline double normal(Xoshiro256& g) {
    double u1 = uniform01(g);
    while (u1 <= 0.0) u1 = uniform01(g);
    const double u2 = uniform01(g);
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(6.283185307179586476925286766559 * u2);
}

// Unbiased bounded draw in [0, n) via rejection.
inline std::uint64_t bounded(Xoshiro256& g, std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        const std::uint64_t r = g.next();
        if (r >= threshold) return r % n;
    }
}

template <typename T>
void shuffle(std::vector<T>& v, Xoshiro256& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

}  // namespace causal::rng
