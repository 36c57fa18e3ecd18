#include "mpibeam/waveform.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mpibeam/rng.hpp"
#include "mpibeam/textio.hpp"

namespace mpibeam {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;

void fft_inplace(std::vector<std::complex<double>>& data, int sign) {
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(data.size()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      reinterpret_cast<fftw_complex*>(data.data()),
                                      sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

std::vector<double> qam_levels(int order) {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
    std::vector<double> lev(side);
    for (int i = 0; i < side; ++i) lev[i] = static_cast<double>(2 * i - (side - 1));
    return lev;
}

void normalize_unit_peak(std::vector<std::complex<double>>& x) {
    double peak = 0.0;
    for (const auto& s : x) peak = std::max(peak, std::abs(s));
    if (peak > 0.0) {
        for (auto& s : x) s /= peak;
    }
}

std::vector<double> kaiser_lowpass(int taps, double cutoff_norm, double beta) {
    if (taps < 3 || taps % 2 == 0) throw std::invalid_argument("filter taps must be odd >= 3");
    if (!(cutoff_norm > 0.0) || cutoff_norm >= 0.5) {
        throw std::invalid_argument("filter cutoff must be in (0, fs/2)");
    }
    std::vector<double> h(taps);
    const double mid = (taps - 1) / 2.0;
    const double i0b = std::cyl_bessel_i(0.0, beta);
    double sum = 0.0;
    for (int i = 0; i < taps; ++i) {
        const double t = i - mid;
        const double x = 2.0 * cutoff_norm * t;
        const double sinc = (t == 0.0) ? 1.0 : std::sin(kPi * x) / (kPi * x);
        const double r = 2.0 * (i - mid) / (taps - 1);
        const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - r * r)) / i0b;
        h[i] = 2.0 * cutoff_norm * sinc * win;
        sum += h[i];
    }
    for (double& v : h) v /= sum;  // unit DC gain
    return h;
}

std::vector<std::complex<double>> convolve_same(
    const std::vector<std::complex<double>>& x, const std::vector<double>& h) {
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(x.size());
    const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(h.size());
    const std::ptrdiff_t half = m / 2;
    std::vector<std::complex<double>> y(x.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        std::complex<double> acc{0.0, 0.0};
        const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, i + half - n + 1);
        const std::ptrdiff_t j1 = std::min<std::ptrdiff_t>(m - 1, i + half);
        for (std::ptrdiff_t j = j0; j <= j1; ++j) acc += h[j] * x[i + half - j];
        y[i] = acc;
    }
    return y;
}

std::vector<std::complex<double>> synth_ofdm(const GenSpec& spec, Rng& rng) {
    const double df = spec.sample_rate / spec.nfft;
    const int slots = static_cast<int>(std::floor(spec.bandwidth / df));
    int used = 2 * static_cast<int>(std::floor(spec.occupied_fraction * slots / 2.0));
    used = std::min(used, spec.nfft - 2);
    if (used < 2) throw std::invalid_argument("no occupied subcarriers; check plan");

    const std::vector<double> lev = qam_levels(spec.order);
    const int stride = spec.nfft + spec.cyclic_prefix;
    const int win = spec.edge_window;
    const int n_sym = static_cast<int>(spec.min_samples / stride) + 2;

    std::vector<double> w(win);
    for (int i = 0; i < win; ++i) w[i] = 0.5 * (1.0 - std::cos(kPi * (i + 0.5) / win));

    std::vector<std::complex<double>> x(static_cast<std::size_t>(n_sym) * stride + win);
    std::vector<std::complex<double>> spec_buf(spec.nfft);
    for (int s = 0; s < n_sym; ++s) {
        std::fill(spec_buf.begin(), spec_buf.end(), std::complex<double>{0.0, 0.0});
        for (int u = 1; u <= used / 2; ++u) {
            spec_buf[u] = {lev[rng.integer(lev.size())], lev[rng.integer(lev.size())]};
            spec_buf[spec.nfft - u] = {lev[rng.integer(lev.size())],
                                       lev[rng.integer(lev.size())]};
        }
        fft_inplace(spec_buf, FFTW_BACKWARD);
        // cyclic extension by cp+win, raised-cosine edges, overlap-add
        const std::size_t base = static_cast<std::size_t>(s) * stride;
        const int ext = spec.cyclic_prefix + win + spec.nfft;
        for (int i = 0; i < ext; ++i) {
            const int src = (i + 2 * spec.nfft - spec.cyclic_prefix - win) % spec.nfft;
            std::complex<double> v = spec_buf[src];
            if (i < win) v *= w[i];
            if (i >= ext - win) v *= w[ext - 1 - i];
            x[base + i] += v;
        }
    }
    // drop the ramp-in, keep whole symbols
    std::vector<std::complex<double>> out(x.begin() + win,
                                          x.begin() + win +
                                              static_cast<std::size_t>(n_sym - 1) * stride);
    return out;
}

std::vector<std::complex<double>> synth_qam_sc(const GenSpec& spec, Rng& rng) {
    const double rs = spec.bandwidth / (1.0 + spec.rrc_beta);
    const int ovs = static_cast<int>(std::floor(spec.sample_rate / rs));
    if (ovs < 4) throw std::invalid_argument("single-carrier oversampling below 4x");

    const std::vector<double> lev = qam_levels(spec.order);
    const int n_sym = static_cast<int>(spec.min_samples) / ovs + spec.rrc_span_symbols + 1;

    // root-raised-cosine pulse
    const int half_span = spec.rrc_span_symbols / 2;
    const int ntap = 2 * half_span * ovs + 1;
    std::vector<double> h(ntap);
    const double beta = spec.rrc_beta;
    for (int i = 0; i < ntap; ++i) {
        const double t = (i - (ntap - 1) / 2.0) / ovs;  // in symbols
        double v;
        if (std::abs(t) < 1e-12) {
            v = 1.0 + beta * (4.0 / kPi - 1.0);
        } else if (std::abs(std::abs(t) - 1.0 / (4.0 * beta)) < 1e-9) {
            v = beta / std::sqrt(2.0) *
                ((1.0 + 2.0 / kPi) * std::sin(kPi / (4.0 * beta)) +
                 (1.0 - 2.0 / kPi) * std::cos(kPi / (4.0 * beta)));
        } else {
            const double den = kPi * t * (1.0 - 16.0 * beta * beta * t * t);
            v = (std::sin(kPi * t * (1.0 - beta)) +
                 4.0 * beta * t * std::cos(kPi * t * (1.0 + beta))) / den;
        }
        h[i] = v;
    }

    std::vector<std::complex<double>> ups(static_cast<std::size_t>(n_sym) * ovs);
    for (int s = 0; s < n_sym; ++s) {
        ups[static_cast<std::size_t>(s) * ovs] = {lev[rng.integer(lev.size())],
                                                  lev[rng.integer(lev.size())]};
    }
    auto shaped = convolve_same(ups, h);
    // trim filter edge transients
    const std::size_t trim = static_cast<std::size_t>(half_span) * ovs;
    return {shaped.begin() + trim, shaped.end() - trim};
}

}  // namespace

void GenSpec::validate() const {
    if (order != 4 && order != 16 && order != 64 && order != 256) {
        throw std::invalid_argument("modulation order must be one of {4, 16, 64, 256}");
    }
    if (!(bandwidth > 0.0) || !(sample_rate > 0.0)) {
        throw std::invalid_argument("bandwidth and sample rate must be positive");
    }
    if (sample_rate < 4.0 * bandwidth) {
        throw std::invalid_argument("oversampling below 4x");
    }
    if (nfft < 8 || (nfft & (nfft - 1)) != 0) {
        throw std::invalid_argument("nfft must be a power of two >= 8");
    }
    if (cyclic_prefix < 0 || cyclic_prefix >= nfft) {
        throw std::invalid_argument("cyclic prefix out of range");
    }
    if (edge_window < 1 || edge_window > cyclic_prefix + nfft) {
        throw std::invalid_argument("edge window out of range");
    }
    if (!(occupied_fraction > 0.0) || occupied_fraction > 1.0) {
        throw std::invalid_argument("occupied fraction outside (0, 1]");
    }
    if (min_samples < 1024) throw std::invalid_argument("too few samples requested");
}

BasebandSignal generate(const GenSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    BasebandSignal sig;
    sig.sample_rate = spec.sample_rate;
    sig.bandwidth = spec.bandwidth;
    sig.scheme = (spec.scheme == Scheme::kOfdm) ? "ofdm" : "qam-sc";
    sig.samples = (spec.scheme == Scheme::kOfdm) ? synth_ofdm(spec, rng)
                                                 : synth_qam_sc(spec, rng);
    if (spec.filter) {
        const auto h = kaiser_lowpass(spec.filter->taps,
                                      spec.filter->cutoff_hz / spec.sample_rate,
                                      spec.filter->kaiser_beta);
        sig.samples = convolve_same(sig.samples, h);
    }
    normalize_unit_peak(sig.samples);
    return sig;
}

BasebandSignal detrough(const BasebandSignal& signal, double floor_fraction) {
    if (!(floor_fraction >= 0.0) || floor_fraction >= 1.0) {
        throw std::invalid_argument("de-trough floor must be in [0, 1)");
    }
    double peak = 0.0;
    for (const auto& s : signal.samples) peak = std::max(peak, std::abs(s));
    const double floor_amp = floor_fraction * peak;

    BasebandSignal out = signal;
    for (auto& s : out.samples) {
        const double a = std::abs(s);
        if (a < floor_amp) {
            // zero keeps no phase; raise it along the real axis
            s = (a == 0.0) ? std::complex<double>{floor_amp, 0.0} : s * (floor_amp / a);
        }
    }
    return out;
}

double papr_db(const std::vector<std::complex<double>>& samples) {
    if (samples.empty()) throw std::invalid_argument("empty signal");
    double peak = 0.0, acc = 0.0;
    for (const auto& s : samples) {
        const double p = std::norm(s);
        peak = std::max(peak, p);
        acc += p;
    }
    if (acc == 0.0) throw std::invalid_argument("zero-power signal");
    return 10.0 * std::log10(peak / (acc / samples.size()));
}

std::vector<std::complex<double>> transmit(const BasebandSignal& signal,
                                           const TxOptions& options) {
    if (options.bits < 1 || options.bits > 40) {
        throw std::invalid_argument("bits out of range");
    }
    const std::int64_t n = std::int64_t{1} << options.bits;
    const std::size_t len = signal.samples.size();
    std::vector<std::complex<double>> out(len);

    if (options.mode == TxMode::kMultiphase) {
        for (std::size_t i = 0; i < len; ++i) {
            const PhasorTarget t = PhasorTarget::from_cartesian(
                signal.samples[i].real(), signal.samples[i].imag());
            const QuantWeights qw = quantize(
                decompose_exact(t, options.phase_count, n), options.phase_count,
                options.quant);
            out[i] = reconstruct(qw, options.phase_count).value();
        }
        return out;
    }

    // polar: k-bit amplitude, phase passed through (ideal PM clock), with
    // optional phase-path lowpass and AM/PM skew
    std::vector<double> amp(len), phase(len);
    for (std::size_t i = 0; i < len; ++i) {
        amp[i] = std::abs(signal.samples[i]);
        phase[i] = std::arg(signal.samples[i]);
    }
    if (options.polar_phase_bw_hz > 0.0) {
        if (!(signal.sample_rate > 0.0)) {
            throw std::invalid_argument("phase-path filter needs a sample rate");
        }
        const double alpha =
            1.0 - std::exp(-kTwoPi * options.polar_phase_bw_hz / signal.sample_rate);
        std::complex<double> state = std::polar(1.0, phase.empty() ? 0.0 : phase[0]);
        for (std::size_t i = 0; i < len; ++i) {
            state += alpha * (std::polar(1.0, phase[i]) - state);
            phase[i] = std::arg(state);
        }
    }
    const int skew = options.am_pm_skew_samples;
    for (std::size_t i = 0; i < len; ++i) {
        const std::ptrdiff_t j =
            std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) - skew, 0,
                                       static_cast<std::ptrdiff_t>(len) - 1);
        const double aq =
            static_cast<double>(std::llround(amp[j] * static_cast<double>(n))) /
            static_cast<double>(n);
        out[i] = std::polar(aq, phase[i]);
    }
    return out;
}

double evm_percent(const std::vector<std::complex<double>>& realized,
                   const std::vector<std::complex<double>>& reference) {
    if (realized.size() != reference.size() || realized.empty()) {
        throw std::invalid_argument("evm needs equal-length non-empty inputs");
    }
    std::complex<double> cross{0.0, 0.0};
    double ref_pow = 0.0;
    for (std::size_t i = 0; i < realized.size(); ++i) {
        cross += std::conj(reference[i]) * realized[i];
        ref_pow += std::norm(reference[i]);
    }
    if (ref_pow == 0.0) throw std::invalid_argument("zero-power reference");
    const std::complex<double> g = cross / ref_pow;
    double err = 0.0, aligned = 0.0;
    for (std::size_t i = 0; i < realized.size(); ++i) {
        const std::complex<double> r = g * reference[i];
        err += std::norm(realized[i] - r);
        aligned += std::norm(r);
    }
    if (aligned == 0.0) throw std::invalid_argument("gain alignment collapsed to zero");
    return 100.0 * std::sqrt(err / aligned);
}

double Psd::band_power(double f_lo, double f_hi) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < freq_hz.size(); ++i) {
        if (freq_hz[i] >= f_lo && freq_hz[i] < f_hi) acc += density[i];
    }
    return acc * bin_hz;
}

double Psd::total_power() const {
    double acc = 0.0;
    for (double d : density) acc += d;
    return acc * bin_hz;
}

Psd psd(const std::vector<std::complex<double>>& samples, double sample_rate,
        int segment_length, double overlap) {
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
    if (segment_length < 8) throw std::invalid_argument("segment too short");
    if (samples.size() < static_cast<std::size_t>(segment_length)) {
        throw std::invalid_argument("signal shorter than one PSD segment");
    }
    if (!(overlap >= 0.0) || overlap >= 1.0) {
        throw std::invalid_argument("overlap outside [0, 1)");
    }
    const int step = std::max(1, static_cast<int>(std::lround(segment_length * (1.0 - overlap))));

    std::vector<double> window(segment_length);
    double wpow = 0.0;
    for (int i = 0; i < segment_length; ++i) {
        window[i] = 0.5 * (1.0 - std::cos(kTwoPi * i / segment_length));
        wpow += window[i] * window[i];
    }

    std::vector<double> acc(segment_length, 0.0);
    std::vector<std::complex<double>> buf(segment_length);
    fftw_plan plan = fftw_plan_dft_1d(segment_length,
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      reinterpret_cast<fftw_complex*>(buf.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    std::size_t blocks = 0;
    for (std::size_t start = 0; start + segment_length <= samples.size(); start += step) {
        for (int i = 0; i < segment_length; ++i) buf[i] = samples[start + i] * window[i];
        fftw_execute(plan);
        for (int i = 0; i < segment_length; ++i) acc[i] += std::norm(buf[i]);
        ++blocks;
    }
    fftw_destroy_plan(plan);

    Psd out;
    out.bin_hz = sample_rate / segment_length;
    out.freq_hz.resize(segment_length);
    out.density.resize(segment_length);
    const double scale = 1.0 / (static_cast<double>(blocks) * wpow * sample_rate);
    for (int i = 0; i < segment_length; ++i) {
        const int src = (i + segment_length / 2) % segment_length;  // fftshift
        out.freq_hz[i] = (i - segment_length / 2) * out.bin_hz;
        out.density[i] = acc[src] * scale;
    }
    return out;
}

AclrResult aclr(const std::vector<std::complex<double>>& samples, double sample_rate,
                double channel_bw, double offset_hz) {
    if (!(channel_bw > 0.0) || !(offset_hz > 0.0)) {
        throw std::invalid_argument("channel bandwidth and offset must be positive");
    }
    if (offset_hz + channel_bw / 2.0 > sample_rate / 2.0) {
        throw std::invalid_argument("adjacent channel falls outside Nyquist");
    }
    const Psd p = psd(samples, sample_rate);
    const double main = p.band_power(-channel_bw / 2.0, channel_bw / 2.0);
    if (main <= 0.0) throw std::invalid_argument("no in-channel power");
    const double lo = p.band_power(-offset_hz - channel_bw / 2.0, -offset_hz + channel_bw / 2.0);
    const double hi = p.band_power(offset_hz - channel_bw / 2.0, offset_hz + channel_bw / 2.0);
    return {10.0 * std::log10(lo / main), 10.0 * std::log10(hi / main)};
}

std::string metric_report_json(const MetricReport& r) {
    std::string s = "{\n";
    s += "  \"evm_pct\": " + format_double(r.evm_pct) + ",\n";
    s += "  \"aclr_lo_dbc\": " + format_double(r.aclr_lo_dbc) + ",\n";
    s += "  \"aclr_hi_dbc\": " + format_double(r.aclr_hi_dbc) + ",\n";
    s += "  \"papr_db\": " + format_double(r.papr_db) + "\n";
    s += "}\n";
    return s;
}

}  // namespace mpibeam
