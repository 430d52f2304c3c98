#pragma once

#include <cmath>
#include <cstdint>

namespace betasurv {

// splitmix64 finalizer. Streams are derived by counter offsets on the state,
// which keeps parallel / per-unit generation reproducible regardless of how
// many draws each unit consumes.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : state_(mix64(seed ^ 0x2545f4914f6cdd1dULL)) {}

    // Independent stream `index` under a dataset-level seed.
    static Rng stream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix64(seed) + 0x9e3779b97f4a7c15ULL * (index + 1));
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }  // [0,1)
    double uniform_pos() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }  // (0,1)

    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    double normal() {
        for (;;) {
            double u = 2.0 * uniform() - 1.0;
            double v = 2.0 * uniform() - 1.0;
            double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    // Marsaglia-Tsang; shape < 1 boosted through shape+1.
    double gamma(double shape) {
        if (shape < 1.0) {
            double g = gamma(shape + 1.0);
            return g * std::pow(uniform_pos(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        double x = gamma(a);
        double y = gamma(b);
        double s = x + y;
        if (s <= 0.0) return a / (a + b);  // both shapes tiny and both draws underflowed
        return x / s;
    }

    // UniformRandomBitGenerator interface, for std::shuffle.
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ULL; }
    result_type operator()() { return next(); }

private:
    std::uint64_t state_;
};

}  // namespace betasurv
