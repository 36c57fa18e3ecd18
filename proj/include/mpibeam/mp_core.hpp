#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace mpibeam {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Complex target expressed as normalized amplitude (full scale = 1) and
/// phase in [0, 2*pi).
struct PhasorTarget {
    double amplitude = 0.0;
    double theta = 0.0;

    static PhasorTarget from_polar(double amplitude, double theta);
    static PhasorTarget from_cartesian(double i, double q);

    double i() const { return amplitude * std::cos(theta); }
    double q() const { return amplitude * std::sin(theta); }
    std::complex<double> value() const { return {i(), q()}; }
};

/// M evenly spaced basis phases, phi_j = 2*pi*j/M. M >= 3: below that the
/// sector geometry degenerates.
class BasisPhaseSet {
  public:
    explicit BasisPhaseSet(int count);
    int count() const { return count_; }
    double phase(int j) const;
    double sector_width() const { return kTwoPi / count_; }
    std::vector<double> phases() const;

  private:
    int count_;
};

/// Real-valued weights on the two basis phases adjacent to the target:
/// phi_sector and phi_{sector+1 mod M}. full_scale is N = 2^k; a target on a
/// basis phase at amplitude 1 decomposes to n1 = N.
struct RealWeights {
    int sector = 0;
    double n1 = 0.0;
    double n2 = 0.0;
    std::int64_t full_scale = 0;
};

/// Integer cell counts after quantization, bounded by n1 + n2 <= full_scale.
struct QuantWeights {
    int sector = 0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::int64_t full_scale = 0;
};

enum class QuantMode { kRounding, kExhaustive };

/// Sector index floor(theta*M/2pi), clamped to [0, M-1].
int sector_index(double theta, int phase_count);

/// Exact decomposition of a target (amplitude <= 1, finite) onto the two
/// adjacent basis phases. Zero amplitude maps to sector 0 with zero weights.
RealWeights decompose_exact(const PhasorTarget& target, int phase_count,
                            std::int64_t full_scale);

PhasorTarget reconstruct_exact(const RealWeights& weights, int phase_count);
PhasorTarget reconstruct(const QuantWeights& weights, int phase_count);

std::complex<double> reconstruct_value(int sector, double n1, double n2,
                                       std::int64_t full_scale, int phase_count);

/// kRounding: per-component round-to-nearest, then clamp onto n1+n2 <= N with
/// a proportional split of the excess (saturates amplitude, keeps phase).
/// kExhaustive: the feasible integer pair closest to the target in the
/// complex plane; ties broken by smaller n1+n2, then smaller n1.
QuantWeights quantize(const RealWeights& weights, int phase_count, QuantMode mode);

struct StateSample {
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double amplitude = 0.0;
    double theta = 0.0;
};

/// All (N+1)(N+2)/2 integer states of one sector with their reconstructed
/// amplitude/phase. Guarded to bits <= 12.
std::vector<StateSample> enumerate_states(int phase_count, int bits, int sector);

}  // namespace mpibeam
