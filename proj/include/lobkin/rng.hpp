#ifndef LOBKIN_RNG_HPP
#define LOBKIN_RNG_HPP

#include <cmath>
#include <cstdint>

namespace lobkin {

// Counter-based generator: the k-th draw for a given seed is a pure function
// of (seed, k), so two runs with the same seed produce identical streams on
// any platform. The standard <random> distributions are not pinned across
// library implementations, which is why the derivations live here.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = seed_ + (++counter_) * 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform on [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer on [lo, hi] inclusive; hi >= lo
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    double normal(double mean = 0.0, double sigma = 1.0) {
        // Box-Muller; u clamped away from 0 so log stays finite.
        double u = uniform();
        if (u < 1e-300) u = 1e-300;
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        return mean + sigma * r * std::cos(6.283185307179586477 * v);
    }

    double exponential(double mean) {
        double u = uniform();
        if (u < 1e-300) u = 1e-300;
        return -mean * std::log(u);
    }

    // Knuth product-of-uniforms; fine for the small rates used here.
    std::int64_t poisson(double lambda) {
        if (lambda <= 0.0) return 0;
        if (lambda > 64.0) {
            const auto n = static_cast<std::int64_t>(std::llround(normal(lambda, std::sqrt(lambda))));
            return n < 0 ? 0 : n;
        }
        const double limit = std::exp(-lambda);
        std::int64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

}  // namespace lobkin

#endif
