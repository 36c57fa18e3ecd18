#pragma once

#include <cstdint>
#include <vector>

#include "mpibeam/mp_core.hpp"

namespace mpibeam {

/// Grid for the resolution sweeps. Amplitudes run from amp_start_db down to
/// amp_stop_db (dB below full scale); phases are sampled uniformly and
/// deterministically in [0, 2pi).
struct ErrorSweepSpec {
    std::vector<int> phase_counts;  // M values
    std::vector<int> bit_widths;    // k values
    double amp_start_db = 0.0;
    double amp_stop_db = -40.0;
    double amp_step_db = 0.25;
    int phase_samples = 4096;
    QuantMode mode = QuantMode::kRounding;

    void validate() const;
    std::vector<double> amplitude_grid_db() const;
};

struct ErrorSweepCell {
    int phase_count = 0;
    int bits = 0;
    double amp_dbfs = 0.0;
    double rms_phase_err_deg = 0.0;
    double rms_amp_err_db = 0.0;  // 20*log10(rms linear deviation / full scale)
};

/// decompose -> quantize -> reconstruct over the grid. Cells are ordered by
/// (M, k, amplitude) regardless of thread count.
std::vector<ErrorSweepCell> rms_error_sweep(const ErrorSweepSpec& spec, int threads = 1);

/// Amplitude (dBFS) at which the rms phase error first crosses `threshold_deg`
/// scanning from full scale downward, linearly interpolated between bins.
/// Returns NaN when the curve never crosses. `cells` must be one (M, k) curve
/// ordered from high to low amplitude.
double phase_error_crossing_db(const std::vector<ErrorSweepCell>& cells,
                               double threshold_deg);

struct ContourState {
    double level = 0.0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    double amplitude = 0.0;
    double theta = 0.0;
};

/// States of every sector whose reconstructed amplitude lies within
/// `tolerance` (absolute, full scale = 1) of a requested level. bits <= 8.
std::vector<ContourState> contour_map(int phase_count, int bits,
                                      const std::vector<double>& levels,
                                      double tolerance = 0.01);

/// Worst-case (mid-sector) full-envelope penalty versus a polar transmitter,
/// -20*log10(cos(pi/M)) dB.
double peak_power_drop_db(int phase_count);

}  // namespace mpibeam
