#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mpibeam/mp_core.hpp"

namespace mpibeam {

struct BasebandSignal {
    std::vector<std::complex<double>> samples;  // unit-peak normalized
    double sample_rate = 0.0;
    std::string scheme;      // "qam-sc" | "ofdm"
    double bandwidth = 0.0;  // channel bandwidth, Hz
};

enum class Scheme { kQamSc, kOfdm };

/// Windowed-sinc channel lowpass (Kaiser). Applied after synthesis to pin
/// the generator's own out-of-band floor below the quantization floors
/// under study.
struct ChannelFilter {
    int taps = 1025;
    double cutoff_hz = 0.0;
    double kaiser_beta = 12.0;
};

struct GenSpec {
    Scheme scheme = Scheme::kOfdm;
    int order = 64;         // {4, 16, 64, 256}
    double bandwidth = 15e6;
    double sample_rate = 120e6;
    std::uint64_t seed = 1;
    std::size_t min_samples = 1u << 16;

    // OFDM plan
    int nfft = 256;
    int cyclic_prefix = 32;
    int edge_window = 64;           // raised-cosine overlap samples
    double occupied_fraction = 0.9;  // of the channel bandwidth

    // single-carrier pulse shaping
    double rrc_beta = 0.25;
    int rrc_span_symbols = 16;

    std::optional<ChannelFilter> filter;

    void validate() const;
};

BasebandSignal generate(const GenSpec& spec);

/// Raises the envelope floor to `floor_fraction` of the peak, phase
/// preserved. floor_fraction in [0, 1).
BasebandSignal detrough(const BasebandSignal& signal, double floor_fraction);

double papr_db(const std::vector<std::complex<double>>& samples);

enum class TxMode { kMultiphase, kPolar };

struct TxOptions {
    TxMode mode = TxMode::kMultiphase;
    int phase_count = 16;
    int bits = 9;
    QuantMode quant = QuantMode::kRounding;

    // optional polar-path impairments, both disabled by default
    double polar_phase_bw_hz = 0.0;  // one-pole lowpass on the phase path
    int am_pm_skew_samples = 0;      // amplitude delayed against phase
};

/// Memoryless sample-by-sample transmission. Multiphase mode quantizes the
/// (n1, n2) pair; polar mode quantizes amplitude to `bits` and passes phase
/// through (ideal phase-modulated clock).
std::vector<std::complex<double>> transmit(const BasebandSignal& signal,
                                           const TxOptions& options);

/// %-rms error vector magnitude after a single least-squares complex gain
/// alignment of the reference.
double evm_percent(const std::vector<std::complex<double>>& realized,
                   const std::vector<std::complex<double>>& reference);

struct Psd {
    std::vector<double> freq_hz;   // fftshifted, [-fs/2, fs/2)
    std::vector<double> density;   // linear power per Hz
    double bin_hz = 0.0;

    double band_power(double f_lo, double f_hi) const;
    double total_power() const;
};

/// Welch averaged periodogram, Hann window.
Psd psd(const std::vector<std::complex<double>>& samples, double sample_rate,
        int segment_length = 1024, double overlap = 0.5);

struct AclrResult {
    double lower_dbc = 0.0;
    double upper_dbc = 0.0;
};

/// Integrated adjacent-channel power ratio at +/- `offset_hz` from the
/// carrier, each channel `channel_bw` wide.
AclrResult aclr(const std::vector<std::complex<double>>& samples,
                double sample_rate, double channel_bw, double offset_hz);

struct MetricReport {
    double evm_pct = 0.0;
    double aclr_lo_dbc = 0.0;
    double aclr_hi_dbc = 0.0;
    double papr_db = 0.0;
};

/// Fixed-key JSON object with shortest round-trip number formatting.
std::string metric_report_json(const MetricReport& report);

}  // namespace mpibeam
