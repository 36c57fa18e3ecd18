#include "mpibeam/scpa.hpp"

#include <cmath>
#include <stdexcept>

namespace mpibeam {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

double vector_sum_sq(double n1, double n2, int phase_count) {
    return n1 * n1 + n2 * n2 + 2.0 * n1 * n2 * std::cos(kTwoPi / phase_count);
}

double loss_numerator(double n1, double n2, double n) {
    return n1 * (n - n1) + n2 * (n - n2);
}

void check_weights(const ScpaConfig& cfg, const QuantWeights& w) {
    if (w.full_scale != cfg.full_scale()) {
        throw std::invalid_argument("weights full scale does not match config");
    }
    if (w.n1 < 0 || w.n2 < 0 || w.n1 + w.n2 > w.full_scale) {
        throw std::invalid_argument("weights outside 0 <= n1+n2 <= N");
    }
}

double closed_form_eta(double q_nw, double n1, double n2, double n, int phase_count) {
    if (q_nw <= 0.0) throw std::invalid_argument("network Q must be positive");
    const double s2 = vector_sum_sq(n1, n2, phase_count);
    if (s2 <= 0.0) {
        throw std::domain_error("drain efficiency undefined at zero output");
    }
    const double loss = kPi * loss_numerator(n1, n2, n) / (4.0 * q_nw * s2);
    return 1.0 / (1.0 + loss);
}

}  // namespace

void ScpaConfig::validate() const {
    if (!(v_dd > 0.0) || !(r_opt > 0.0) || !(c_unit > 0.0) || !(f0 > 0.0)) {
        throw std::invalid_argument("electrical parameters must be positive");
    }
    if (bits < 1 || bits > 62) throw std::invalid_argument("bits out of range");
    if (phase_count < 3) throw std::invalid_argument("phase count must be >= 3");
}

double output_voltage(const ScpaConfig& cfg, const QuantWeights& w) {
    cfg.validate();
    check_weights(cfg, w);
    const double n = static_cast<double>(w.full_scale);
    const double s2 = vector_sum_sq(static_cast<double>(w.n1),
                                    static_cast<double>(w.n2), cfg.phase_count);
    return (2.0 * cfg.v_dd / kPi) * std::sqrt(s2) / n;
}

double output_power(const ScpaConfig& cfg, const QuantWeights& w) {
    cfg.validate();
    check_weights(cfg, w);
    const double n = static_cast<double>(w.full_scale);
    const double s2 = vector_sum_sq(static_cast<double>(w.n1),
                                    static_cast<double>(w.n2), cfg.phase_count);
    return (2.0 / (kPi * kPi)) * (s2 / (n * n)) * cfg.v_dd * cfg.v_dd / cfg.r_opt;
}

double input_capacitance(const ScpaConfig& cfg, const QuantWeights& w) {
    cfg.validate();
    check_weights(cfg, w);
    const double n = static_cast<double>(w.full_scale);
    const double n1 = static_cast<double>(w.n1), n2 = static_cast<double>(w.n2);
    return (n1 * (n - n1) + n2 * (n - n2) + 2.0 * n1 * n2) / (n * n) * cfg.c_unit;
}

double input_power(const ScpaConfig& cfg, const QuantWeights& w) {
    return input_capacitance(cfg, w) * cfg.v_dd * cfg.v_dd * cfg.f0;
}

double switched_series_capacitance(const ScpaConfig& cfg, const QuantWeights& w) {
    cfg.validate();
    check_weights(cfg, w);
    const double n = static_cast<double>(w.full_scale);
    const double n1 = static_cast<double>(w.n1), n2 = static_cast<double>(w.n2);
    return loss_numerator(n1, n2, n) / n * cfg.c_unit;
}

double network_q(const ScpaConfig& cfg) {
    cfg.validate();
    const double total_c = static_cast<double>(cfg.full_scale()) * cfg.c_unit;
    return 1.0 / (kTwoPi * total_c * cfg.r_opt * cfg.f0);
}

double series_inductance(const ScpaConfig& cfg) {
    cfg.validate();
    const double total_c = static_cast<double>(cfg.full_scale()) * cfg.c_unit;
    const double w0 = kTwoPi * cfg.f0;
    return 1.0 / (total_c * w0 * w0);
}

double drain_efficiency(double q_nw, const QuantWeights& w, int phase_count) {
    if (w.n1 < 0 || w.n2 < 0 || w.n1 + w.n2 > w.full_scale) {
        throw std::invalid_argument("weights outside 0 <= n1+n2 <= N");
    }
    return closed_form_eta(q_nw, static_cast<double>(w.n1), static_cast<double>(w.n2),
                           static_cast<double>(w.full_scale), phase_count);
}

double drain_efficiency(double q_nw, const RealWeights& w, int phase_count) {
    return closed_form_eta(q_nw, w.n1, w.n2, static_cast<double>(w.full_scale),
                           phase_count);
}

double drain_efficiency(const ScpaConfig& cfg, const QuantWeights& w) {
    check_weights(cfg, w);
    return drain_efficiency(network_q(cfg), w, cfg.phase_count);
}

double drain_efficiency(const ScpaConfig& cfg, double q_nw, const QuantWeights& w) {
    const double derived = network_q(cfg);
    if (std::abs(q_nw - derived) > 1e-9 * std::abs(derived)) {
        throw std::invalid_argument("supplied network Q disagrees with config");
    }
    return drain_efficiency(derived, w, cfg.phase_count);
}

double drain_efficiency_from_powers(const ScpaConfig& cfg, const QuantWeights& w) {
    const double p_out = output_power(cfg, w);
    if (p_out <= 0.0) {
        throw std::domain_error("drain efficiency undefined at zero output");
    }
    const double p_sw = switched_series_capacitance(cfg, w) * cfg.v_dd * cfg.v_dd * cfg.f0;
    return p_out / (p_out + p_sw);
}

OperatingPoint operating_point(const ScpaConfig& cfg, const QuantWeights& w) {
    OperatingPoint op;
    op.weights = w;
    op.v_out = output_voltage(cfg, w);
    op.p_out = output_power(cfg, w);
    op.c_in = input_capacitance(cfg, w);
    op.p_in = input_power(cfg, w);
    op.eta = (w.n1 == 0 && w.n2 == 0) ? 0.0 : drain_efficiency(cfg, w);
    return op;
}

std::vector<EfficiencyPoint> efficiency_curve(double q_nw, int phase_count,
                                              const std::vector<double>& amp_dbfs_grid,
                                              int theta_samples) {
    if (theta_samples < 1) throw std::invalid_argument("theta samples must be >= 1");
    if (q_nw <= 0.0) throw std::invalid_argument("network Q must be positive");
    // the closed form is scale-free in the weights, so evaluate on the exact
    // decomposition at an arbitrary full scale
    const std::int64_t n = std::int64_t{1} << 16;
    std::vector<EfficiencyPoint> out;
    out.reserve(amp_dbfs_grid.size());
    for (double adb : amp_dbfs_grid) {
        const double amp = std::pow(10.0, adb / 20.0);
        double eta_sum = 0.0;
        double pout_sum = 0.0;
        for (int i = 0; i < theta_samples; ++i) {
            const double theta = kTwoPi * i / theta_samples;
            RealWeights w = decompose_exact(PhasorTarget::from_polar(amp, theta),
                                            phase_count, n);
            // saturate onto the reachable envelope, phase preserved
            const double sum = w.n1 + w.n2;
            if (sum > static_cast<double>(n)) {
                const double scale = static_cast<double>(n) / sum;
                w.n1 *= scale;
                w.n2 *= scale;
            }
            eta_sum += closed_form_eta(q_nw, w.n1, w.n2, static_cast<double>(n),
                                       phase_count);
            const double s2 = vector_sum_sq(w.n1, w.n2, phase_count);
            pout_sum += s2 / (static_cast<double>(n) * static_cast<double>(n));
        }
        EfficiencyPoint p;
        p.amp_dbfs = adb;
        p.pout_db = 10.0 * std::log10(pout_sum / theta_samples);
        p.mean_eta = eta_sum / theta_samples;
        out.push_back(p);
    }
    return out;
}

}  // namespace mpibeam
