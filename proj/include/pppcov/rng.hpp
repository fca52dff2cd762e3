#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pppcov {

// Deterministic random generator. The engine is mt19937_64 (bit-exact per
// the standard); all variate transforms are implemented here rather than
// with std:: distributions, so streams are reproducible across standard
// library versions. substream() derives independent generators from
// (seed, block index) for block-parallel simulation.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(mix64(seed)) {}

    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        return Rng(mix64(seed) ^ mix64(index + 0x9e3779b97f4a7c15ull));
    }

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on (0, 1].
    double uniform() {
        return static_cast<double>((eng_() >> 11) + 1) * 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform()); }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u = uniform();
        const double v = uniform();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double ang = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(ang);
        have_spare_ = true;
        return r * std::cos(ang);
    }

    // Gamma(shape k integer, scale 1) as a sum of exponentials.
    double gamma_integer(int k) {
        double acc = 0.0;
        for (int i = 0; i < k; ++i) acc += exponential();
        return acc;
    }

    // Counting process with unit-exponential gaps up to `mean`.
    std::uint64_t poisson(double mean) {
        std::uint64_t n = 0;
        double acc = exponential();
        while (acc < mean) {
            ++n;
            acc += exponential();
        }
        return n;
    }

private:
    static std::uint64_t mix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace pppcov
