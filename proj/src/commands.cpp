#include "mpibeam/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mpibeam/beamformer.hpp"
#include "mpibeam/decoder.hpp"
#include "mpibeam/iq_io.hpp"
#include "mpibeam/quant_analysis.hpp"
#include "mpibeam/rng.hpp"
#include "mpibeam/scpa.hpp"
#include "mpibeam/waveform.hpp"

namespace mpibeam {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

std::filesystem::path ensure_out_dir(const RunOptions& opts) {
    const std::filesystem::path dir(opts.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory: " + opts.out_dir);
    return dir;
}

std::vector<int> int_list(const ConfigFile& cfg, const std::string& section,
                          const std::string& key, const std::vector<int>& fallback) {
    std::vector<double> fb(fallback.begin(), fallback.end());
    std::vector<int> out;
    for (double d : cfg.get_list(section, key, fb)) {
        const int v = static_cast<int>(std::llround(d));
        if (static_cast<double>(v) != d) {
            throw std::runtime_error("config [" + section + "] " + key +
                                     ": expected integers");
        }
        out.push_back(v);
    }
    return out;
}

QuantMode resolve_quant_mode(const RunOptions& opts, const std::string& section) {
    if (opts.quant_mode_set) return opts.quant_mode;
    const std::string s = opts.config.get_string(
        section, "quant_mode",
        opts.quant_mode == QuantMode::kRounding ? "rounding" : "exhaustive");
    if (s == "rounding") return QuantMode::kRounding;
    if (s == "exhaustive") return QuantMode::kExhaustive;
    throw std::runtime_error("config [" + section + "] quant_mode: expected "
                             "rounding|exhaustive");
}

void write_sweep_cells_csv(const std::filesystem::path& path,
                           const std::vector<ErrorSweepCell>& cells) {
    CsvWriter csv(path.string());
    csv.row({"M", "k", "amp_dbfs", "rms_phase_err_deg", "rms_amp_err_db"});
    for (const auto& c : cells) {
        csv.row({std::to_string(c.phase_count), std::to_string(c.bits),
                 format_double(c.amp_dbfs), format_double(c.rms_phase_err_deg),
                 format_double(c.rms_amp_err_db)});
    }
}

// wide per-figure format: one x column, one curve column per swept value
void write_figure_csv(const std::filesystem::path& path,
                      const std::vector<ErrorSweepCell>& cells,
                      const std::vector<double>& amps, bool sweep_m, bool phase_err) {
    std::vector<int> curves;
    for (const auto& c : cells) {
        const int v = sweep_m ? c.phase_count : c.bits;
        if (std::find(curves.begin(), curves.end(), v) == curves.end()) curves.push_back(v);
    }
    CsvWriter csv(path.string());
    std::vector<std::string> header{"amp_dbfs"};
    const std::string prefix =
        std::string(phase_err ? "rms_phase_err_deg" : "rms_amp_err_db") +
        (sweep_m ? "_m" : "_k");
    for (int v : curves) header.push_back(prefix + std::to_string(v));
    csv.row(header);
    for (std::size_t a = 0; a < amps.size(); ++a) {
        std::vector<std::string> row{format_double(amps[a])};
        for (int v : curves) {
            for (const auto& c : cells) {
                const int cv = sweep_m ? c.phase_count : c.bits;
                if (cv == v && c.amp_dbfs == amps[a]) {
                    row.push_back(format_double(phase_err ? c.rms_phase_err_deg
                                                          : c.rms_amp_err_db));
                    break;
                }
            }
        }
        csv.row(row);
    }
}

}  // namespace

void self_check() {
    // round-trip identity on a small deterministic set
    Rng rng(0xC0FFEE);
    for (int m : {3, 4, 8, 16, 32}) {
        for (int i = 0; i < 50; ++i) {
            const PhasorTarget t =
                PhasorTarget::from_polar(rng.uniform(), rng.uniform(0.0, kTwoPi));
            const PhasorTarget r =
                reconstruct_exact(decompose_exact(t, m, 512), m);
            if (std::abs(r.value() - t.value()) >
                1e-12 * std::max(1e-30, t.amplitude)) {
                throw std::runtime_error("self-check: decomposition round trip failed");
            }
        }
    }
    // closed-form efficiency against the compositional route
    for (int i = 0; i < 100; ++i) {
        ScpaConfig cfg;
        cfg.v_dd = rng.uniform(0.5, 3.0);
        cfg.r_opt = rng.uniform(1.0, 50.0);
        cfg.c_unit = rng.uniform(1e-15, 1e-12);
        cfg.f0 = rng.uniform(0.5e9, 6e9);
        cfg.bits = 4 + static_cast<int>(rng.integer(9));
        cfg.phase_count = (i % 2 == 0) ? 16 : 8;
        const std::int64_t n = cfg.full_scale();
        const std::int64_t n1 = static_cast<std::int64_t>(rng.integer(n));
        const std::int64_t n2 = static_cast<std::int64_t>(rng.integer(n - n1 + 1));
        if (n1 == 0 && n2 == 0) continue;
        const QuantWeights w{0, n1, n2, n};
        const double a = drain_efficiency(cfg, w);
        const double b = drain_efficiency_from_powers(cfg, w);
        if (std::abs(a - b) > 1e-12 * a) {
            throw std::runtime_error("self-check: efficiency identity failed");
        }
    }
    // weight codec spot checks, incl. the implicit full-scale state
    for (std::int64_t v : {std::int64_t{0}, std::int64_t{1}, std::int64_t{4097},
                           std::int64_t{65535}, std::int64_t{65536}}) {
        if (decode_weight(encode_weight(v, 16), 16) != v) {
            throw std::runtime_error("self-check: weight codec failed");
        }
    }
}

std::vector<std::string> cmd_error_sweep(const RunOptions& opts) {
    const std::string sec = "error-sweep";
    opts.config.require_known_keys(
        sec, {"m_list", "k_fixed", "m_fixed", "k_list", "amp_start_db", "amp_stop_db",
              "amp_step_db", "phase_samples", "quant_mode"});
    const auto dir = ensure_out_dir(opts);

    ErrorSweepSpec vs_m;
    vs_m.phase_counts = int_list(opts.config, sec, "m_list", {4, 8, 16});
    vs_m.bit_widths = {static_cast<int>(opts.config.get_int(sec, "k_fixed", 9))};
    vs_m.amp_start_db = opts.config.get_double(sec, "amp_start_db", 0.0);
    vs_m.amp_stop_db = opts.config.get_double(sec, "amp_stop_db", -40.0);
    vs_m.amp_step_db = opts.config.get_double(sec, "amp_step_db", 0.25);
    vs_m.phase_samples =
        static_cast<int>(opts.config.get_int(sec, "phase_samples", 4096));
    vs_m.mode = resolve_quant_mode(opts, sec);

    ErrorSweepSpec vs_k = vs_m;
    vs_k.phase_counts = {static_cast<int>(opts.config.get_int(sec, "m_fixed", 16))};
    vs_k.bit_widths = int_list(opts.config, sec, "k_list", {7, 8, 9, 10, 11});

    if (vs_m.phase_counts.empty()) throw std::runtime_error("empty M list");

    const auto cells_m = rms_error_sweep(vs_m, opts.threads);
    const auto cells_k = rms_error_sweep(vs_k, opts.threads);
    const auto amps = vs_m.amplitude_grid_db();

    std::vector<ErrorSweepCell> all = cells_m;
    all.insert(all.end(), cells_k.begin(), cells_k.end());
    write_sweep_cells_csv(dir / "sweep_cells.csv", all);
    write_figure_csv(dir / "fig09_rms_phase_err.csv", cells_m, amps, true, true);
    write_figure_csv(dir / "fig10_rms_amp_err.csv", cells_m, amps, true, false);
    write_figure_csv(dir / "fig11_rms_phase_err.csv", cells_k, amps, false, true);
    write_figure_csv(dir / "fig12_rms_amp_err.csv", cells_k, amps, false, false);
    return {"sweep_cells.csv", "fig09_rms_phase_err.csv", "fig10_rms_amp_err.csv",
            "fig11_rms_phase_err.csv", "fig12_rms_amp_err.csv"};
}

std::vector<std::string> cmd_contours(const RunOptions& opts) {
    const std::string sec = "contours";
    opts.config.require_known_keys(sec, {"pairs", "levels", "tolerance"});
    const auto dir = ensure_out_dir(opts);

    const std::string pairs_raw =
        opts.config.get_string(sec, "pairs", "4:3,8:3,4:6,8:6");
    const std::vector<double> levels =
        opts.config.get_list(sec, "levels", {1.0, 0.5, 0.25, 0.125, 0.0});
    const double tol = opts.config.get_double(sec, "tolerance", 0.01);

    std::vector<std::pair<int, int>> pairs;
    std::istringstream ps(pairs_raw);
    std::string item;
    while (std::getline(ps, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::runtime_error("contours pairs: expected M:k entries");
        }
        pairs.emplace_back(std::stoi(item.substr(0, colon)),
                           std::stoi(item.substr(colon + 1)));
    }
    if (pairs.empty()) throw std::runtime_error("contours: empty pair list");

    std::vector<std::string> files;
    for (const auto& [m, k] : pairs) {
        const std::string name =
            "contours_m" + std::to_string(m) + "_k" + std::to_string(k) + ".csv";
        CsvWriter csv((dir / name).string());
        csv.row({"level", "n1", "n2", "amplitude", "phase_deg"});
        for (const ContourState& s : contour_map(m, k, levels, tol)) {
            csv.row({format_double(s.level), std::to_string(s.n1), std::to_string(s.n2),
                     format_double(s.amplitude), format_double(s.theta * kRadToDeg)});
        }
        files.push_back(name);
    }
    return files;
}

std::vector<std::string> cmd_efficiency(const RunOptions& opts) {
    const std::string sec = "efficiency";
    opts.config.require_known_keys(
        sec, {"q_nw", "m", "v_dd", "r_opt", "c_unit", "k", "f0", "amp_start_db",
              "amp_stop_db", "amp_step_db", "theta_samples"});
    const auto dir = ensure_out_dir(opts);

    const int m = static_cast<int>(opts.config.get_int(sec, "m", 16));
    double q_nw;
    const bool has_electrical = opts.config.has(sec, "c_unit") ||
                                opts.config.has(sec, "r_opt") ||
                                opts.config.has(sec, "f0") || opts.config.has(sec, "k");
    if (has_electrical) {
        ScpaConfig cfg;
        cfg.v_dd = opts.config.get_double(sec, "v_dd", 1.0);
        cfg.r_opt = opts.config.get_double(sec, "r_opt", 6.25);
        cfg.c_unit = opts.config.get_double(sec, "c_unit", 4.85e-12 / 512.0);
        cfg.bits = static_cast<int>(opts.config.get_int(sec, "k", 9));
        cfg.phase_count = m;
        cfg.f0 = opts.config.get_double(sec, "f0", 1.75e9);
        q_nw = network_q(cfg);
        if (opts.config.has(sec, "q_nw")) {
            const double supplied = opts.config.get_double(sec, "q_nw", q_nw);
            if (std::abs(supplied - q_nw) > 1e-9 * std::abs(q_nw)) {
                throw std::runtime_error("efficiency: supplied q_nw disagrees with "
                                         "the electrical parameters");
            }
        }
    } else {
        q_nw = opts.config.get_double(sec, "q_nw", 3.0);
    }

    const double start = opts.config.get_double(sec, "amp_start_db", 0.0);
    const double stop = opts.config.get_double(sec, "amp_stop_db", -20.0);
    const double step = opts.config.get_double(sec, "amp_step_db", 0.25);
    if (!(step > 0.0) || stop > start) throw std::runtime_error("bad amplitude grid");
    std::vector<double> grid;
    for (double a = start; a >= stop - 1e-12; a -= step) grid.push_back(a);
    const int theta_samples =
        static_cast<int>(opts.config.get_int(sec, "theta_samples", 256));

    CsvWriter csv((dir / "efficiency.csv").string());
    csv.row({"amp_dbfs", "pout_db", "mean_eta"});
    for (const EfficiencyPoint& p : efficiency_curve(q_nw, m, grid, theta_samples)) {
        csv.row({format_double(p.amp_dbfs), format_double(p.pout_db),
                 format_double(p.mean_eta)});
    }
    return {"efficiency.csv"};
}

std::vector<std::string> cmd_beam(const RunOptions& opts) {
    const std::string sec = "beam";
    opts.config.require_known_keys(
        sec, {"elements", "spacing", "model", "m", "k", "taper", "table",
              "table_code_bits", "steer_start_deg", "steer_stop_deg", "steer_step_deg",
              "pattern_steer_deg", "grid_step_deg", "quant_mode"});
    const auto dir = ensure_out_dir(opts);

    BeamScenario scenario;
    scenario.geometry.count = static_cast<int>(opts.config.get_int(sec, "elements", 4));
    scenario.geometry.spacing = opts.config.get_double(sec, "spacing", 0.5);
    const auto taper = opts.config.get_list(sec, "taper", {});
    scenario.taper.assign(taper.begin(), taper.end());

    const std::string model_name = opts.config.get_string(sec, "model", "quantized");
    MeasuredTable table = MeasuredTable::ideal(0);
    if (model_name == "ideal") {
        scenario.model = ElementModel::ideal();
    } else if (model_name == "quantized") {
        scenario.model = ElementModel::quantized(
            static_cast<int>(opts.config.get_int(sec, "m", 16)),
            static_cast<int>(opts.config.get_int(sec, "k", 9)),
            resolve_quant_mode(opts, sec));
    } else if (model_name == "measured") {
        const std::string path = opts.config.get_string(sec, "table", "");
        if (path.empty()) throw std::runtime_error("beam: measured model needs table=");
        table = MeasuredTable::load_csv(
            path, static_cast<int>(opts.config.get_int(sec, "table_code_bits", 9)));
        scenario.model = ElementModel::measured(table);
    } else {
        throw std::runtime_error("beam: model must be ideal|quantized|measured");
    }

    const double s0 = opts.config.get_double(sec, "steer_start_deg", 0.0);
    const double s1 = opts.config.get_double(sec, "steer_stop_deg", 60.0);
    const double ds = opts.config.get_double(sec, "steer_step_deg", 1.0);
    if (!(ds > 0.0) || s1 < s0) throw std::runtime_error("bad steering sweep");
    std::vector<double> steers;
    for (double s = s0; s <= s1 + 1e-9; s += ds) steers.push_back(s * kDegToRad);

    const double grid_step =
        opts.config.get_double(sec, "grid_step_deg", 0.25) * kDegToRad;

    std::vector<std::string> files;
    // patterns at the requested steering angles
    for (double sd : opts.config.get_list(sec, "pattern_steer_deg", {0.0, 30.0})) {
        BeamScenario sc = scenario;
        sc.steering_rad = sd * kDegToRad;
        sc.validate();
        std::vector<double> grid;
        for (double a = -89.0; a <= 89.0 + 1e-9; a += grid_step * kRadToDeg) {
            grid.push_back(a * kDegToRad);
        }
        const auto gains = apply_element_model(steering_weights(sc), sc.model);
        const auto pattern = array_factor(gains, sc.geometry, grid);
        std::ostringstream name;
        name << "pattern_steer" << format_double(sd) << ".csv";
        CsvWriter csv((dir / name.str()).string());
        csv.row({"theta_deg", "mag_db", "phase_deg"});
        for (const PatternPoint& p : pattern) {
            csv.row({format_double(p.theta_rad * kRadToDeg),
                     format_double(20.0 * std::log10(std::abs(p.af))),
                     format_double(std::arg(p.af) * kRadToDeg)});
        }
        files.push_back(name.str());
    }

    const BeamErrorStats stats = steering_sweep_errors(scenario, steers, grid_step);
    {
        CsvWriter csv((dir / "beam_errors.csv").string());
        csv.row({"steer_deg", "phase_err_deg", "amp_err_db"});
        for (const BeamError& e : stats.points) {
            csv.row({format_double(e.steering_rad * kRadToDeg),
                     format_double(e.phase_err_deg), format_double(e.amp_err_db)});
        }
        files.push_back("beam_errors.csv");
    }
    {
        std::ofstream js(dir / "beam_summary.json", std::ios::binary);
        js << "{\n  \"rms_phase_err_deg\": " << format_double(stats.rms_phase_err_deg)
           << ",\n  \"rms_amp_err_db\": " << format_double(stats.rms_amp_err_db)
           << "\n}\n";
        files.push_back("beam_summary.json");
    }
    return files;
}

std::vector<std::string> cmd_modulate(const RunOptions& opts) {
    const std::string sec = "modulate";
    opts.config.require_known_keys(
        sec, {"scheme", "order", "bandwidth_hz", "sample_rate_hz", "min_samples",
              "nfft", "cyclic_prefix", "edge_window", "occupied_fraction",
              "filter_taps", "filter_cutoff_hz", "filter_beta", "detrough", "m", "k",
              "mode", "quant_mode", "polar_phase_bw_hz", "am_pm_skew",
              "psd_segment", "aclr_offset_hz"});
    const auto dir = ensure_out_dir(opts);

    GenSpec gen;
    const std::string scheme = opts.config.get_string(sec, "scheme", "ofdm");
    if (scheme == "ofdm") {
        gen.scheme = Scheme::kOfdm;
    } else if (scheme == "qam-sc") {
        gen.scheme = Scheme::kQamSc;
    } else {
        throw std::runtime_error("modulate: scheme must be ofdm|qam-sc");
    }
    gen.order = static_cast<int>(opts.config.get_int(sec, "order", 64));
    gen.bandwidth = opts.config.get_double(sec, "bandwidth_hz", 15e6);
    gen.sample_rate = opts.config.get_double(sec, "sample_rate_hz", 120e6);
    gen.min_samples =
        static_cast<std::size_t>(opts.config.get_int(sec, "min_samples", 1 << 16));
    gen.nfft = static_cast<int>(opts.config.get_int(sec, "nfft", 256));
    gen.cyclic_prefix = static_cast<int>(opts.config.get_int(sec, "cyclic_prefix", 32));
    gen.edge_window = static_cast<int>(opts.config.get_int(sec, "edge_window", 64));
    gen.occupied_fraction = opts.config.get_double(sec, "occupied_fraction", 0.9);
    gen.seed = opts.seed;
    const int taps = static_cast<int>(opts.config.get_int(sec, "filter_taps", 0));
    if (taps > 0) {
        gen.filter = ChannelFilter{
            taps, opts.config.get_double(sec, "filter_cutoff_hz", gen.bandwidth / 2.0),
            opts.config.get_double(sec, "filter_beta", 12.0)};
    }

    BasebandSignal sig = generate(gen);
    const double trough = opts.config.get_double(sec, "detrough", 0.0);
    if (trough > 0.0) sig = detrough(sig, trough);

    TxOptions tx;
    const std::string mode = opts.config.get_string(sec, "mode", "multiphase");
    if (mode == "multiphase") {
        tx.mode = TxMode::kMultiphase;
    } else if (mode == "polar") {
        tx.mode = TxMode::kPolar;
    } else {
        throw std::runtime_error("modulate: mode must be multiphase|polar");
    }
    tx.phase_count = static_cast<int>(opts.config.get_int(sec, "m", 16));
    tx.bits = static_cast<int>(opts.config.get_int(sec, "k", 9));
    tx.quant = resolve_quant_mode(opts, sec);
    tx.polar_phase_bw_hz = opts.config.get_double(sec, "polar_phase_bw_hz", 0.0);
    tx.am_pm_skew_samples = static_cast<int>(opts.config.get_int(sec, "am_pm_skew", 0));

    const auto realized = transmit(sig, tx);

    MetricReport report;
    report.evm_pct = evm_percent(realized, sig.samples);
    const double offset = opts.config.get_double(sec, "aclr_offset_hz", gen.bandwidth);
    const AclrResult ac = aclr(realized, gen.sample_rate, gen.bandwidth, offset);
    report.aclr_lo_dbc = ac.lower_dbc;
    report.aclr_hi_dbc = ac.upper_dbc;
    report.papr_db = papr_db(sig.samples);

    write_iq((dir / "reference.iq").string(), sig.samples, gen.sample_rate);
    write_iq((dir / "realized.iq").string(), realized, gen.sample_rate);
    {
        std::ofstream js(dir / "metrics.json", std::ios::binary);
        js << metric_report_json(report);
    }
    const int seg = static_cast<int>(opts.config.get_int(sec, "psd_segment", 1024));
    for (const auto& [name, samples] :
         {std::pair<std::string, const std::vector<std::complex<double>>*>{
              "psd_reference.csv", &sig.samples},
          {"psd_realized.csv", &realized}}) {
        const Psd p = psd(*samples, gen.sample_rate, seg);
        CsvWriter csv((dir / name).string());
        csv.row({"freq_hz", "psd_dbhz"});
        for (std::size_t i = 0; i < p.freq_hz.size(); ++i) {
            csv.row({format_double(p.freq_hz[i]),
                     format_double(10.0 * std::log10(p.density[i] + 1e-300))});
        }
    }
    return {"reference.iq", "reference.iq.hdr", "realized.iq", "realized.iq.hdr",
            "metrics.json", "psd_reference.csv", "psd_realized.csv"};
}

std::vector<std::string> cmd_vectors(const RunOptions& opts) {
    const std::string sec = "vectors";
    opts.config.require_known_keys(
        sec, {"steps", "m", "k", "unary_bits", "phase_code_bits", "active_bits",
              "beam_amp_code", "beam_phase_code"});
    const auto dir = ensure_out_dir(opts);

    DecoderConfig dc;
    dc.phase_count = static_cast<int>(opts.config.get_int(sec, "m", 16));
    dc.bits = static_cast<int>(opts.config.get_int(sec, "k", 16));
    dc.unary_bits = static_cast<int>(opts.config.get_int(sec, "unary_bits", 4));
    dc.phase_code_bits =
        static_cast<int>(opts.config.get_int(sec, "phase_code_bits", 16));
    dc.active_bits = static_cast<int>(opts.config.get_int(sec, "active_bits", 0));
    dc.validate();

    const std::uint64_t amp_span = std::uint64_t{1} << dc.bits;
    const std::uint64_t phase_span = std::uint64_t{1} << dc.phase_code_bits;
    const int steps = static_cast<int>(opts.config.get_int(sec, "steps", 256));
    if (steps < 0) throw std::runtime_error("vectors: negative step count");

    // defaults reproduce the beamforming walkthrough: full beam weight at 30deg
    const auto beam_amp = static_cast<std::uint32_t>(opts.config.get_int(
        sec, "beam_amp_code", static_cast<std::int64_t>(amp_span - 1)));
    const auto beam_phase = static_cast<std::uint32_t>(opts.config.get_int(
        sec, "beam_phase_code", static_cast<std::int64_t>(phase_span / 12)));

    MpDecoder dec(dc);
    Rng rng(opts.seed);
    std::ofstream out(dir / "vectors.txt", std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vectors.txt for writing");

    const DecoderInput load{true, beam_amp, beam_phase};
    out << format_vector_line(load, dec.step(load)) << "\n";
    for (int i = 0; i < steps; ++i) {
        const DecoderInput in{false,
                              static_cast<std::uint32_t>(rng.integer(amp_span)),
                              static_cast<std::uint32_t>(rng.integer(phase_span))};
        out << format_vector_line(in, dec.step(in)) << "\n";
    }
    return {"vectors.txt"};
}

}  // namespace mpibeam
