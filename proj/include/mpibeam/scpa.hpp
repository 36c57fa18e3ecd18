#pragma once

#include <cstdint>
#include <vector>

#include "mpibeam/mp_core.hpp"

namespace mpibeam {

/// Electrical parameters of one MP-SCPA core. N = 2^bits unit cells of
/// c_unit farads each, driven from v_dd into the optimum load r_opt at f0.
struct ScpaConfig {
    double v_dd = 1.0;
    double r_opt = 1.0;
    double c_unit = 1e-12;
    int bits = 9;
    int phase_count = 16;
    double f0 = 1.75e9;

    std::int64_t full_scale() const { return std::int64_t{1} << bits; }
    void validate() const;
};

/// Output voltage amplitude across r_opt, (2*v_dd/pi) * sqrt(S)/N with
/// S = n1^2 + n2^2 + 2*n1*n2*cos(2pi/M).
double output_voltage(const ScpaConfig& cfg, const QuantWeights& w);

/// P_out = (2/pi^2) * S/N^2 * v_dd^2/r_opt.
double output_power(const ScpaConfig& cfg, const QuantWeights& w);

/// Total input capacitance presented to the drivers,
/// [n1(N-n1) + n2(N-n2) + 2*n1*n2]/N^2 * c_unit.
double input_capacitance(const ScpaConfig& cfg, const QuantWeights& w);

/// Dynamic power to switch the input capacitance, C_in * v_dd^2 * f0.
double input_power(const ScpaConfig& cfg, const QuantWeights& w);

/// Series-equivalent capacitance charged through the output network per
/// cycle, [n1(N-n1) + n2(N-n2)]/N * c_unit. Each phase group switches
/// against the rest of the array held static; this is the quantity whose
/// switching loss composes to the closed-form drain efficiency.
double switched_series_capacitance(const ScpaConfig& cfg, const QuantWeights& w);

/// Quality factor of the series-resonant output network,
/// 1/(2*pi*N*c_unit*r_opt*f0).
double network_q(const ScpaConfig& cfg);

/// Series inductance resonant with the total array capacitance,
/// 1/(N*c_unit*(2*pi*f0)^2).
double series_inductance(const ScpaConfig& cfg);

/// Closed-form ideal drain efficiency at a given network Q. Throws on a
/// zero-output state.
double drain_efficiency(double q_nw, const QuantWeights& w, int phase_count);
double drain_efficiency(double q_nw, const RealWeights& w, int phase_count);

/// Derives Q from the config.
double drain_efficiency(const ScpaConfig& cfg, const QuantWeights& w);

/// Analysis mode with an explicit Q: the supplied value must agree with the
/// config-derived one to 1e-9 relative.
double drain_efficiency(const ScpaConfig& cfg, double q_nw, const QuantWeights& w);

/// Compositional route: P_out / (P_out + P_sw) with P_sw the switching power
/// of the series-equivalent capacitance. Equals the closed form identically.
double drain_efficiency_from_powers(const ScpaConfig& cfg, const QuantWeights& w);

struct OperatingPoint {
    QuantWeights weights;
    double v_out = 0.0;
    double p_out = 0.0;
    double c_in = 0.0;
    double p_in = 0.0;
    double eta = 0.0;
};

OperatingPoint operating_point(const ScpaConfig& cfg, const QuantWeights& w);

struct EfficiencyPoint {
    double amp_dbfs = 0.0;
    double pout_db = 0.0;  // mean realized output power re peak, dB
    double mean_eta = 0.0;
};

/// Mean ideal drain efficiency versus amplitude backoff, evaluated on the
/// exact (real-valued) decomposition over a uniform phase grid.
std::vector<EfficiencyPoint> efficiency_curve(double q_nw, int phase_count,
                                              const std::vector<double>& amp_dbfs_grid,
                                              int theta_samples);

}  // namespace mpibeam
