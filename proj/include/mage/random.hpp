#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace mage {

// Deterministic random source. mt19937_64 output is fixed by the standard, and the
// bounded draws below avoid the implementation-defined std distributions so that
// seeded runs reproduce across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform integer in [0, n). n must be positive.
    std::size_t below(std::size_t n)
    {
        const std::uint64_t bound = n;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % bound);
    }

    // Uniform integer in [lo, hi].
    std::int64_t between(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo) + 1));
    }

    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool chance(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

} // namespace mage
