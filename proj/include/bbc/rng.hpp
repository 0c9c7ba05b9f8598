#pragma once

#include <cstdint>
#include <random>

namespace bbc {

// Deterministic random source. std::uniform_real_distribution and
// std::normal_distribution are implementation-defined, so campaigns that
// must reproduce bit-exactly across standard libraries draw through this
// wrapper instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine for the small n used here.
        return engine_() % n;
    }

    // Standard normal via Box-Muller (pair cached).
    double normal();

    std::uint64_t raw() { return engine_(); }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace bbc
