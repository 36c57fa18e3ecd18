#include "mpibeam/quant_analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace mpibeam {

namespace {

constexpr double kRadToDeg = 57.295779513082320876798154814105;

struct CellTask {
    int phase_count;
    int bits;
    double amp_dbfs;
};

ErrorSweepCell compute_cell(const CellTask& task, int phase_samples, QuantMode mode) {
    const std::int64_t n = std::int64_t{1} << task.bits;
    const double amp = std::pow(10.0, task.amp_dbfs / 20.0);
    double ph_acc = 0.0;
    double amp_acc = 0.0;
    for (int i = 0; i < phase_samples; ++i) {
        const double theta = kTwoPi * i / phase_samples;
        const RealWeights rw =
            decompose_exact(PhasorTarget::from_polar(amp, theta), task.phase_count, n);
        const QuantWeights qw = quantize(rw, task.phase_count, mode);
        const PhasorTarget got = reconstruct(qw, task.phase_count);
        const double dphi = std::remainder(got.theta - theta, kTwoPi);
        const double damp = got.amplitude - amp;
        ph_acc += dphi * dphi;
        amp_acc += damp * damp;
    }
    ErrorSweepCell cell;
    cell.phase_count = task.phase_count;
    cell.bits = task.bits;
    cell.amp_dbfs = task.amp_dbfs;
    cell.rms_phase_err_deg = std::sqrt(ph_acc / phase_samples) * kRadToDeg;
    cell.rms_amp_err_db = 20.0 * std::log10(std::sqrt(amp_acc / phase_samples));
    return cell;
}

}  // namespace

void ErrorSweepSpec::validate() const {
    if (phase_counts.empty() || bit_widths.empty()) {
        throw std::invalid_argument("sweep needs at least one M and one k");
    }
    for (int m : phase_counts) {
        if (m < 3) throw std::invalid_argument("phase count must be >= 3");
    }
    for (int k : bit_widths) {
        if (k < 1 || k > 24) throw std::invalid_argument("bits out of range");
    }
    if (amp_start_db > 0.0 || amp_stop_db > amp_start_db) {
        throw std::invalid_argument("amplitude grid must descend from <= 0 dBFS");
    }
    if (!(amp_step_db > 0.0)) throw std::invalid_argument("amplitude step must be positive");
    if (phase_samples < 1) throw std::invalid_argument("phase samples must be >= 1");
}

std::vector<double> ErrorSweepSpec::amplitude_grid_db() const {
    std::vector<double> grid;
    const int count =
        static_cast<int>(std::floor((amp_start_db - amp_stop_db) / amp_step_db + 0.5)) + 1;
    grid.reserve(count);
    for (int i = 0; i < count; ++i) grid.push_back(amp_start_db - i * amp_step_db);
    return grid;
}

std::vector<ErrorSweepCell> rms_error_sweep(const ErrorSweepSpec& spec, int threads) {
    spec.validate();
    if (threads < 1) threads = 1;
    const std::vector<double> amps = spec.amplitude_grid_db();

    std::vector<CellTask> tasks;
    tasks.reserve(spec.phase_counts.size() * spec.bit_widths.size() * amps.size());
    for (int m : spec.phase_counts) {
        for (int k : spec.bit_widths) {
            for (double a : amps) tasks.push_back({m, k, a});
        }
    }

    std::vector<ErrorSweepCell> cells(tasks.size());
    if (threads == 1 || tasks.size() < 2) {
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            cells[i] = compute_cell(tasks[i], spec.phase_samples, spec.mode);
        }
        return cells;
    }

    std::vector<std::thread> pool;
    const std::size_t n_threads = std::min<std::size_t>(threads, tasks.size());
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = t; i < tasks.size(); i += n_threads) {
                cells[i] = compute_cell(tasks[i], spec.phase_samples, spec.mode);
            }
        });
    }
    for (auto& th : pool) th.join();
    return cells;
}

double phase_error_crossing_db(const std::vector<ErrorSweepCell>& cells,
                               double threshold_deg) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i].rms_phase_err_deg > threshold_deg) {
            if (i == 0) return cells[0].amp_dbfs;
            const double x0 = cells[i - 1].amp_dbfs, x1 = cells[i].amp_dbfs;
            const double y0 = cells[i - 1].rms_phase_err_deg,
                         y1 = cells[i].rms_phase_err_deg;
            return x0 + (threshold_deg - y0) * (x1 - x0) / (y1 - y0);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<ContourState> contour_map(int phase_count, int bits,
                                      const std::vector<double>& levels,
                                      double tolerance) {
    if (bits > 8) throw std::invalid_argument("contour enumeration limited to bits <= 8");
    if (levels.empty()) throw std::invalid_argument("no contour levels");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("negative tolerance");
    std::vector<ContourState> out;
    for (int sector = 0; sector < phase_count; ++sector) {
        for (const StateSample& s : enumerate_states(phase_count, bits, sector)) {
            // pure upper-phase states repeat as (n1, 0) of the next sector,
            // and the origin would repeat in every sector: emit each once
            if (s.n1 == 0 && (s.n2 > 0 || sector > 0)) continue;
            // assign to the nearest level; keep only states inside the band
            double best_level = levels.front();
            double best_dist = std::abs(s.amplitude - levels.front());
            for (double lv : levels) {
                const double d = std::abs(s.amplitude - lv);
                if (d < best_dist) {
                    best_dist = d;
                    best_level = lv;
                }
            }
            if (best_dist <= tolerance) {
                out.push_back({best_level, s.n1, s.n2, s.amplitude, s.theta});
            }
        }
    }
    return out;
}

double peak_power_drop_db(int phase_count) {
    if (phase_count < 3) throw std::invalid_argument("phase count must be >= 3");
    constexpr double kPi = 3.14159265358979323846264338328;
    return -20.0 * std::log10(std::cos(kPi / phase_count));
}

}  // namespace mpibeam
