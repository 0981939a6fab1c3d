#pragma once

// Deterministic random number streams. Every stochastic component in the
// library draws from an Rng seeded through derive_seed(root, label, index),
// so a run is fully reproducible from one root seed on any platform and at
// any thread count. No std::random distributions are used: their output is
// implementation-defined, which would break cross-platform replay.

#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "irtens/special.hpp"

namespace irtens {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Labeled seed derivation: hashes the component label into the root seed,
// then mixes in a stream index. Distinct labels or indices give
// independent-looking streams from the same root.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t index = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ root;
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::uint64_t state = h;
    splitmix64(state);
    state ^= index * 0xd1342543de82ef95ULL;
    std::uint64_t out = state;
    splitmix64(out);
    return out;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_); }

    // Uniform on [0,1) with 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform strictly inside (0,1); safe for logs and inverse CDFs.
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    bool bernoulli(double p) { return uniform() < p; }

    // Unbiased integer in [0, bound) by rejection (Lemire's method).
    std::uint64_t below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("Rng::below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    double normal() { return inverse_normal_cdf(uniform_open()); }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    double exponential() { return -std::log(uniform_open()); }

    // Marsaglia-Tsang for shape >= 1, boosted for shape < 1. Unit scale.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("Rng::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform_open();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x = normal();
            double v = 1.0 + c * x;
            if (v <= 0.0) continue;
            v = v * v * v;
            const double u = uniform_open();
            if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
                return d * v;
            }
        }
    }

    double gamma(double shape, double scale) { return scale * gamma(shape); }

    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }

    double inverse_gamma(double shape, double scale) { return scale / gamma(shape); }

    // Fisher-Yates; identical results on every platform.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// Draw from N(mean, 1) truncated to [0, inf) by inverse CDF. The quantile
// is evaluated in whichever tail keeps the argument away from 1, so the
// draw stays accurate even when the untruncated mass above 0 is ~1e-300.
inline double truncated_normal_nonneg(Rng& rng, double mean) {
    const double a = -mean;  // standardized truncation point
    const double u = rng.uniform_open();
    const double tail = normal_cdf_c(a);          // mass of the kept region
    const double q_hi = tail * (1.0 - u);         // mass above the draw
    double t;
    if (q_hi < 0.5) {
        t = -inverse_normal_cdf(q_hi);
    } else {
        t = inverse_normal_cdf(normal_cdf(a) + u * tail);
    }
    return mean + t;
}

// Draw from N(mean, 1) truncated to (-inf, 0).
inline double truncated_normal_neg(Rng& rng, double mean) {
    return -truncated_normal_nonneg(rng, -mean);
}

}  // namespace irtens
