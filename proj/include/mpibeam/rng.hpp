#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace mpibeam {

/// Seeded mt19937_64 with hand-rolled output mappings so that streams are
/// bit-identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound). Rejection-free multiply-shift map.
    std::uint64_t integer(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(gen_()) * bound) >> 64);
    }

    /// Standard complex Gaussian (unit variance per complex sample).
    std::complex<double> gaussian() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace mpibeam
