#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "polydina/error.hpp"

namespace polydina {

// Deterministic, platform-portable random source.
//
// std::mt19937_64's raw output sequence is fully specified by the standard,
// but the std distribution adaptors (uniform_real_distribution etc.) are
// implementation-defined. Everything here is built directly on the raw
// 64-bit stream so that a fixed seed yields byte-identical draws on any
// conforming toolchain.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random mantissa bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    // Index draw by inverse CDF over (unnormalized) nonnegative weights.
    int categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) fail(Errc::numeric, "categorical draw: weights sum to zero");
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

    // Strictly positive random point on the probability simplex
    // (normalized exponential draws).
    std::vector<double> simplex(std::size_t n) {
        std::vector<double> x(n);
        double total = 0.0;
        for (auto& v : x) {
            double u = uniform01();
            // keep draws away from 0 so no coordinate collapses to 0
            if (u < 1e-12) u = 1e-12;
            v = -std::log(u);
            total += v;
        }
        for (auto& v : x) v /= total;
        return x;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace polydina
