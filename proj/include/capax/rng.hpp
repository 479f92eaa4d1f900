#pragma once
// Deterministic uniform source. Bits are mapped to doubles by hand so that
// streams are reproducible byte-for-byte regardless of the standard library's
// distribution implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace capax {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // uniform integer in [0, n), n tiny relative to 2^64 so modulo bias is nil
    std::uint64_t below(std::uint64_t n) { return eng_() % n; }

    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * uniform());
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace capax
