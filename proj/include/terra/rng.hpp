#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace terra {

/// splitmix64; used to derive independent deterministic substreams from a
/// scenario seed so that per-run results do not depend on evaluation order.
inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Stable stream seed for (seed, stream_id, index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0) {
    std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    std::uint64_t a = splitmix64(x);
    x ^= index * 0xda942042e4dd58b5ULL;
    std::uint64_t b = splitmix64(x);
    return a ^ (b << 1);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform() { // [0, 1)
        return (eng_() >> 11) * (1.0 / 9007199254740992.0);
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)) % n;
    }
    double exponential(double rate) {
        double u;
        do { u = uniform(); } while (u <= 0.0);
        return -std::log(u) / rate;
    }
    /// Knuth's method; fine for the means used here (mu well under ~50).
    std::uint64_t poisson(double mu) {
        double l = std::exp(-mu), p = 1.0;
        std::uint64_t k = 0;
        do {
            ++k;
            p *= uniform();
        } while (p > l);
        return k - 1;
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace terra
