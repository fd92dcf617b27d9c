#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

namespace aprep {

/// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` under `master`. Streams with different indices are
/// statistically independent.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

/// Platform-independent random source.
///
/// The bit generator is std::mt19937_64, whose output sequence is fixed by the
/// standard. All conversions to doubles, integers and normals are done here
/// rather than through <random> distributions, whose algorithms are
/// implementation-defined. Together this makes every stream reproducible from
/// its seed on any conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Unbiased (Lemire's multiply-and-reject).
    std::size_t index(std::size_t n) {
        if (n == 0) {
            throw std::invalid_argument("Rng::index: empty range");
        }
        const auto bound = static_cast<std::uint64_t>(n);
        unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
        auto low = static_cast<std::uint64_t>(m);
        if (low < bound) {
            const std::uint64_t threshold = (0 - bound) % bound;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(engine_()) * bound;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::size_t>(m >> 64);
    }

    /// Uniform integer in [lo, hi].
    std::size_t between(std::size_t lo, std::size_t hi) { return lo + index(hi - lo + 1); }

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via the Box-Muller transform; the second variate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    /// Geometric variate on {1, 2, ...} with the given mean (>= 1).
    std::size_t geometric(double mean) {
        if (!(mean >= 1.0)) {
            throw std::invalid_argument("Rng::geometric: mean must be >= 1");
        }
        if (mean == 1.0) {
            return 1;
        }
        const double p = 1.0 / mean;
        double u = 0.0;
        do {
            u = uniform();
        } while (u <= 0.0);
        return static_cast<std::size_t>(std::ceil(std::log(u) / std::log1p(-p)));
    }

    /// Fisher-Yates shuffle.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace aprep
