#include "mpibeam/mp_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mpibeam {

namespace {

void check_phase_count(int phase_count) {
    if (phase_count < 3) {
        throw std::invalid_argument("phase count must be >= 3, got " +
                                    std::to_string(phase_count));
    }
}

void check_full_scale(std::int64_t full_scale) {
    if (full_scale < 1) {
        throw std::invalid_argument("full scale must be positive");
    }
}

double wrap_two_pi(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

}  // namespace

PhasorTarget PhasorTarget::from_polar(double amplitude, double theta) {
    if (!std::isfinite(amplitude) || !std::isfinite(theta)) {
        throw std::invalid_argument("non-finite phasor target");
    }
    if (amplitude < 0.0) {
        throw std::invalid_argument("negative amplitude");
    }
    if (amplitude == 0.0) return {0.0, 0.0};
    return {amplitude, wrap_two_pi(theta)};
}

PhasorTarget PhasorTarget::from_cartesian(double i, double q) {
    if (!std::isfinite(i) || !std::isfinite(q)) {
        throw std::invalid_argument("non-finite phasor target");
    }
    const double a = std::hypot(i, q);
    if (a == 0.0) return {0.0, 0.0};
    return {a, wrap_two_pi(std::atan2(q, i))};
}

BasisPhaseSet::BasisPhaseSet(int count) : count_(count) { check_phase_count(count); }

double BasisPhaseSet::phase(int j) const {
    if (j < 0 || j >= count_) throw std::out_of_range("basis phase index");
    return kTwoPi * j / count_;
}

std::vector<double> BasisPhaseSet::phases() const {
    std::vector<double> out(count_);
    for (int j = 0; j < count_; ++j) out[j] = kTwoPi * j / count_;
    return out;
}

int sector_index(double theta, int phase_count) {
    check_phase_count(phase_count);
    const double t = wrap_two_pi(theta);
    int m = static_cast<int>(std::floor(t * phase_count / kTwoPi));
    return std::clamp(m, 0, phase_count - 1);
}

RealWeights decompose_exact(const PhasorTarget& target, int phase_count,
                            std::int64_t full_scale) {
    check_phase_count(phase_count);
    check_full_scale(full_scale);
    if (!std::isfinite(target.amplitude) || !std::isfinite(target.theta)) {
        throw std::invalid_argument("non-finite phasor target");
    }
    if (target.amplitude > 1.0 + 1e-12) {
        throw std::invalid_argument("amplitude exceeds full scale: " +
                                    std::to_string(target.amplitude));
    }
    const double amp = std::min(target.amplitude, 1.0);
    if (amp == 0.0) return {0, 0.0, 0.0, full_scale};

    const double theta = wrap_two_pi(target.theta);
    const int m = sector_index(theta, phase_count);
    const double p0 = kTwoPi * m / phase_count;
    const double p1 = kTwoPi * (m + 1) / phase_count;
    const double inv_det = 1.0 / std::sin(kTwoPi / phase_count);
    const double i = amp * std::cos(theta);
    const double q = amp * std::sin(theta);
    const double n = static_cast<double>(full_scale);

    double n1 = n * (i * std::sin(p1) - q * std::cos(p1)) * inv_det;
    double n2 = n * (-i * std::sin(p0) + q * std::cos(p0)) * inv_det;
    // boundary rounding can leave weights a few ulp below zero
    if (n1 < 0.0) n1 = 0.0;
    if (n2 < 0.0) n2 = 0.0;
    return {m, n1, n2, full_scale};
}

std::complex<double> reconstruct_value(int sector, double n1, double n2,
                                       std::int64_t full_scale, int phase_count) {
    check_phase_count(phase_count);
    check_full_scale(full_scale);
    const double p0 = kTwoPi * sector / phase_count;
    const double p1 = kTwoPi * (sector + 1) / phase_count;
    const double inv_n = 1.0 / static_cast<double>(full_scale);
    return {(n1 * std::cos(p0) + n2 * std::cos(p1)) * inv_n,
            (n1 * std::sin(p0) + n2 * std::sin(p1)) * inv_n};
}

namespace {

PhasorTarget reconstruct_impl(int sector, double n1, double n2,
                              std::int64_t full_scale, int phase_count) {
    if (n1 < 0.0 || n2 < 0.0) throw std::invalid_argument("negative weights");
    const std::complex<double> z = reconstruct_value(sector, n1, n2, full_scale, phase_count);
    if (z == std::complex<double>{0.0, 0.0}) return {0.0, 0.0};
    const double a = std::abs(z);
    double t = std::atan2(z.imag(), z.real());
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return {a, t};
}

}  // namespace

PhasorTarget reconstruct_exact(const RealWeights& w, int phase_count) {
    return reconstruct_impl(w.sector, w.n1, w.n2, w.full_scale, phase_count);
}

PhasorTarget reconstruct(const QuantWeights& w, int phase_count) {
    return reconstruct_impl(w.sector, static_cast<double>(w.n1),
                            static_cast<double>(w.n2), w.full_scale, phase_count);
}

namespace {

QuantWeights quantize_rounding(const RealWeights& w) {
    const std::int64_t n = w.full_scale;
    std::int64_t r1 = std::llround(w.n1);
    std::int64_t r2 = std::llround(w.n2);
    std::int64_t sum = r1 + r2;
    if (sum > n) {
        // saturate onto the n1+n2=N boundary, splitting the excess in
        // proportion so the state's phase direction is kept
        const std::int64_t excess = sum - n;
        const std::int64_t d1 = std::llround(static_cast<double>(excess) *
                                             static_cast<double>(r1) /
                                             static_cast<double>(sum));
        r1 -= d1;
        r2 -= excess - d1;
    }
    return {w.sector, r1, r2, n};
}

struct Candidate {
    double dist2 = 0.0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    bool valid = false;
};

// lexicographic (distance, n1+n2, n1)
bool better(const Candidate& a, const Candidate& b) {
    if (!b.valid) return true;
    if (a.dist2 != b.dist2) return a.dist2 < b.dist2;
    const std::int64_t sa = a.n1 + a.n2, sb = b.n1 + b.n2;
    if (sa != sb) return sa < sb;
    return a.n1 < b.n1;
}

// squared distance (in weight units) between integer (a, b) and the real
// weight pair; equals N^2 times the squared complex-plane distance
double weight_dist2(double d1, double d2, double c) {
    return d1 * d1 + d2 * d2 + 2.0 * c * d1 * d2;
}

// metric projection of (x1, x2) onto {a >= 0, b >= 0, a + b <= N} under the
// quadratic form [[1, c], [c, 1]]
void project_feasible(double x1, double x2, double n, double c, double& p1, double& p2) {
    if (x1 >= 0.0 && x2 >= 0.0 && x1 + x2 <= n) {
        p1 = x1;
        p2 = x2;
        return;
    }
    struct Seg {
        double ax, ay, bx, by;
    };
    const Seg segs[3] = {{0, 0, n, 0}, {0, 0, 0, n}, {n, 0, 0, n}};
    double best = -1.0;
    for (const Seg& s : segs) {
        const double vx = s.bx - s.ax, vy = s.by - s.ay;
        const double wx = x1 - s.ax, wy = x2 - s.ay;
        // inner products under the metric
        const double vv = vx * vx + vy * vy + 2.0 * c * vx * vy;
        const double vw = vx * wx + vy * wy + c * (vx * wy + vy * wx);
        const double t = std::clamp(vw / vv, 0.0, 1.0);
        const double cx = s.ax + t * vx, cy = s.ay + t * vy;
        const double d = weight_dist2(cx - x1, cy - x2, c);
        if (best < 0.0 || d < best) {
            best = d;
            p1 = cx;
            p2 = cy;
        }
    }
}

QuantWeights quantize_exhaustive(const RealWeights& w, int phase_count) {
    const std::int64_t n = w.full_scale;
    const double nd = static_cast<double>(n);
    const double c = std::cos(kTwoPi / phase_count);
    const double x1 = w.n1, x2 = w.n2;

    double p1 = 0.0, p2 = 0.0;
    project_feasible(x1, x2, nd, c, p1, p2);

    // feasible integer reference near the projection
    std::int64_t a0 = std::clamp<std::int64_t>(std::llround(p1), 0, n);
    std::int64_t b0 = std::clamp<std::int64_t>(std::llround(p2), 0, n - a0);

    // any optimum z* satisfies, in the metric,
    //   |z* - p|^2 <= |z0 - p|^2 + 2 |x - p| |z0 - p|
    // (projection inequality against the reference z0), and the metric bounds
    // the n1 spread by sqrt(bound / (1 - |c|)).
    const double d_ref = std::sqrt(weight_dist2(static_cast<double>(a0) - p1,
                                                static_cast<double>(b0) - p2, c));
    const double d_proj = std::sqrt(weight_dist2(x1 - p1, x2 - p2, c));
    const double bound2 = d_ref * d_ref + 2.0 * d_proj * d_ref;
    const double lam_min = 1.0 - std::abs(c);
    const std::int64_t half_width =
        static_cast<std::int64_t>(std::ceil(std::sqrt(bound2 / lam_min))) + 2;

    const std::int64_t lo = std::max<std::int64_t>(0, std::llround(p1) - half_width);
    const std::int64_t hi = std::min<std::int64_t>(n, std::llround(p1) + half_width);

    Candidate best;
    auto consider = [&](std::int64_t a, std::int64_t b) {
        const Candidate cand{weight_dist2(static_cast<double>(a) - x1,
                                          static_cast<double>(b) - x2, c),
                             a, b, true};
        if (better(cand, best)) best = cand;
    };
    consider(a0, b0);
    for (std::int64_t a = lo; a <= hi; ++a) {
        // per-column 1D minimum of the convex quadratic in b
        const double b_cont = x2 + c * (x1 - static_cast<double>(a));
        const std::int64_t b = std::clamp<std::int64_t>(std::llround(b_cont), 0, n - a);
        consider(a, b);
    }
    return {w.sector, best.n1, best.n2, n};
}

}  // namespace

QuantWeights quantize(const RealWeights& w, int phase_count, QuantMode mode) {
    check_phase_count(phase_count);
    check_full_scale(w.full_scale);
    if (!std::isfinite(w.n1) || !std::isfinite(w.n2) || w.n1 < 0.0 || w.n2 < 0.0) {
        throw std::invalid_argument("invalid real weights");
    }
    if (mode == QuantMode::kRounding) return quantize_rounding(w);
    return quantize_exhaustive(w, phase_count);
}

std::vector<StateSample> enumerate_states(int phase_count, int bits, int sector) {
    check_phase_count(phase_count);
    if (bits < 0 || bits > 12) {
        throw std::invalid_argument("state enumeration limited to bits <= 12");
    }
    if (sector < 0 || sector >= phase_count) throw std::out_of_range("sector");
    const std::int64_t n = std::int64_t{1} << bits;
    std::vector<StateSample> out;
    out.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
    for (std::int64_t n1 = 0; n1 <= n; ++n1) {
        for (std::int64_t n2 = 0; n2 <= n - n1; ++n2) {
            const PhasorTarget t = reconstruct({sector, n1, n2, n}, phase_count);
            out.push_back({n1, n2, t.amplitude, t.theta});
        }
    }
    return out;
}

}  // namespace mpibeam
