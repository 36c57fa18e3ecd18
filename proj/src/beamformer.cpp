#include "mpibeam/beamformer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mpibeam {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kDegToRad = kPi / 180.0;
constexpr double kRadToDeg = 180.0 / kPi;

}  // namespace

void ArrayGeometry::validate() const {
    if (count < 1) throw std::invalid_argument("element count must be >= 1");
    if (!(spacing > 0.0)) throw std::invalid_argument("element spacing must be positive");
}

void BeamScenario::validate() const {
    geometry.validate();
    if (!(std::abs(steering_rad) < kPi / 2.0)) {
        throw std::invalid_argument("steering angle must satisfy |angle| < pi/2");
    }
    if (!taper.empty() && static_cast<int>(taper.size()) != geometry.count) {
        throw std::invalid_argument("taper length does not match element count");
    }
    for (double t : taper) {
        if (!(t >= 0.0) || t > 1.0) throw std::invalid_argument("taper outside [0, 1]");
    }
}

MeasuredTable MeasuredTable::load_csv(const std::string& path, int code_bits) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open measured table: " + path);
    MeasuredTable table(code_bits);
    std::string line;
    bool header = true;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (header) {  // element,phase_code,realized_phase_deg,realized_amp_db
            header = false;
            continue;
        }
        std::istringstream ls(line);
        std::string field;
        int element = 0;
        Entry e;
        try {
            std::getline(ls, field, ',');
            element = std::stoi(field);
            std::getline(ls, field, ',');
            e.phase_code = std::stoi(field);
            std::getline(ls, field, ',');
            e.phase_deg = std::stod(field);
            std::getline(ls, field, ',');
            e.amp_db = std::stod(field);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed measured-table row");
        }
        table.add(element, e);
    }
    return table;
}

MeasuredTable MeasuredTable::ideal(int elements, int code_bits, int entries) {
    MeasuredTable table(code_bits);
    const int codes = 1 << code_bits;
    for (int el = 0; el < elements; ++el) {
        for (int i = 0; i < entries; ++i) {
            const int code = static_cast<int>(static_cast<long long>(i) * codes / entries);
            table.add(el, {code, 360.0 * code / codes, 0.0});
        }
    }
    return table;
}

void MeasuredTable::add(int element, const Entry& e) {
    if (e.phase_code < 0 || e.phase_code >= (1 << code_bits_)) {
        throw std::invalid_argument("phase code outside the table code range");
    }
    auto& v = entries_[element];
    const auto pos = std::lower_bound(
        v.begin(), v.end(), e,
        [](const Entry& a, const Entry& b) { return a.phase_code < b.phase_code; });
    if (pos != v.end() && pos->phase_code == e.phase_code) {
        throw std::invalid_argument("duplicate phase code in measured table");
    }
    v.insert(pos, e);
}

std::complex<double> MeasuredTable::lookup(int element, double phase_rad) const {
    const auto it = entries_.find(element);
    if (it == entries_.end() || it->second.empty()) {
        throw std::out_of_range("measured table does not cover element " +
                                std::to_string(element));
    }
    const auto& v = it->second;
    const int codes = 1 << code_bits_;
    double t = std::fmod(phase_rad, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    const double code = t / kTwoPi * codes;

    // bracketing entries, wrapping around the code circle
    std::size_t hi = 0;
    while (hi < v.size() && v[hi].phase_code < code) ++hi;
    const std::size_t lo = (hi == 0) ? v.size() - 1 : hi - 1;
    const bool wrapped = (hi == 0 || hi == v.size());
    if (hi == v.size()) hi = 0;

    double c0 = v[lo].phase_code, c1 = v[hi].phase_code;
    double p0 = v[lo].phase_deg, p1 = v[hi].phase_deg;
    if (wrapped) {
        c1 += codes;
        p1 += 360.0;
        if (code < c0) {
            c0 -= codes;
            p0 -= 360.0;
            c1 -= codes;
            p1 -= 360.0;
        }
    }
    const double span = c1 - c0;
    const double u = (span == 0.0) ? 0.0 : (code - c0) / span;
    const double phase_deg = p0 + u * (p1 - p0);
    const double amp_db = v[lo].amp_db + u * (v[hi].amp_db - v[lo].amp_db);
    return std::polar(std::pow(10.0, amp_db / 20.0), phase_deg * kDegToRad);
}

ElementModel ElementModel::quantized(int phase_count, int bits, QuantMode mode) {
    ElementModel m;
    m.kind = ElementModelKind::kQuantized;
    m.phase_count = phase_count;
    m.bits = bits;
    m.mode = mode;
    return m;
}

ElementModel ElementModel::measured(const MeasuredTable& table) {
    ElementModel m;
    m.kind = ElementModelKind::kMeasuredTable;
    m.table = &table;
    return m;
}

std::vector<PhasorTarget> steering_weights(const BeamScenario& scenario) {
    scenario.validate();
    const int n = scenario.geometry.count;
    std::vector<PhasorTarget> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        const double phase =
            -kTwoPi * scenario.geometry.spacing * i * std::sin(scenario.steering_rad);
        const double amp = scenario.taper.empty() ? 1.0 : scenario.taper[i];
        out.push_back(PhasorTarget::from_polar(amp, phase));
    }
    return out;
}

std::vector<std::complex<double>> apply_element_model(
    const std::vector<PhasorTarget>& weights, const ElementModel& model) {
    if (!model.phase_offset_rad.empty() &&
        model.phase_offset_rad.size() != weights.size()) {
        throw std::invalid_argument("calibration offsets do not match element count");
    }
    std::vector<std::complex<double>> gains;
    gains.reserve(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        std::complex<double> g;
        switch (model.kind) {
            case ElementModelKind::kIdeal:
                g = weights[i].value();
                break;
            case ElementModelKind::kQuantized: {
                const std::int64_t n = std::int64_t{1} << model.bits;
                const QuantWeights qw =
                    quantize(decompose_exact(weights[i], model.phase_count, n),
                             model.phase_count, model.mode);
                g = reconstruct(qw, model.phase_count).value();
                break;
            }
            case ElementModelKind::kMeasuredTable: {
                if (model.table == nullptr) {
                    throw std::invalid_argument("measured model without a table");
                }
                g = weights[i].amplitude *
                    model.table->lookup(static_cast<int>(i), weights[i].theta);
                break;
            }
        }
        if (!model.phase_offset_rad.empty()) {
            g *= std::polar(1.0, -model.phase_offset_rad[i]);
        }
        gains.push_back(g);
    }
    return gains;
}

std::vector<PatternPoint> array_factor(const std::vector<std::complex<double>>& gains,
                                       const ArrayGeometry& geometry,
                                       const std::vector<double>& angles_rad) {
    geometry.validate();
    if (static_cast<int>(gains.size()) != geometry.count) {
        throw std::invalid_argument("gain count does not match geometry");
    }
    std::vector<PatternPoint> out;
    out.reserve(angles_rad.size());
    const double norm = static_cast<double>(geometry.count);
    for (double th : angles_rad) {
        if (!(std::abs(th) < kPi / 2.0)) {
            throw std::invalid_argument("pattern angle must satisfy |angle| < pi/2");
        }
        std::complex<double> af{0.0, 0.0};
        for (int i = 0; i < geometry.count; ++i) {
            af += gains[i] *
                  std::polar(1.0, kTwoPi * geometry.spacing * i * std::sin(th));
        }
        out.push_back({th, af / norm});
    }
    return out;
}

namespace {

std::complex<double> pattern_at(const std::vector<PatternPoint>& pattern, double angle) {
    const auto it = std::lower_bound(
        pattern.begin(), pattern.end(), angle,
        [](const PatternPoint& p, double a) { return p.theta_rad < a; });
    if (it != pattern.end() && std::abs(it->theta_rad - angle) < 1e-12) return it->af;
    if (it == pattern.begin() || it == pattern.end()) {
        throw std::invalid_argument("steered angle outside the pattern grid");
    }
    const auto lo = it - 1;
    const double u = (angle - lo->theta_rad) / (it->theta_rad - lo->theta_rad);
    return lo->af + u * (it->af - lo->af);
}

}  // namespace

BeamErrorStats beam_error_metrics(
    const std::vector<std::vector<PatternPoint>>& realized,
    const std::vector<std::vector<PatternPoint>>& ideal,
    const std::vector<double>& steering_rad) {
    if (realized.size() != ideal.size() || realized.size() != steering_rad.size()) {
        throw std::invalid_argument("pattern and steering lists differ in length");
    }
    BeamErrorStats stats;
    double ph_acc = 0.0, amp_acc = 0.0;
    for (std::size_t s = 0; s < realized.size(); ++s) {
        const auto& pr = realized[s];
        const auto& pi = ideal[s];
        if (pr.size() != pi.size()) {
            throw std::invalid_argument("realized/ideal pattern grids differ");
        }
        for (std::size_t j = 0; j < pr.size(); ++j) {
            if (pr[j].theta_rad != pi[j].theta_rad) {
                throw std::invalid_argument("realized/ideal pattern grids differ");
            }
        }
        const std::complex<double> ar = pattern_at(pr, steering_rad[s]);
        const std::complex<double> ai = pattern_at(pi, steering_rad[s]);
        BeamError e;
        e.steering_rad = steering_rad[s];
        e.phase_err_deg = std::arg(ar * std::conj(ai)) * kRadToDeg;
        e.amp_err_db = 20.0 * std::log10(std::abs(ar) / std::abs(ai));
        ph_acc += e.phase_err_deg * e.phase_err_deg;
        amp_acc += e.amp_err_db * e.amp_err_db;
        stats.points.push_back(e);
    }
    const double n = static_cast<double>(stats.points.size());
    stats.rms_phase_err_deg = std::sqrt(ph_acc / n);
    stats.rms_amp_err_db = std::sqrt(amp_acc / n);
    return stats;
}

BeamErrorStats steering_sweep_errors(const BeamScenario& scenario,
                                     const std::vector<double>& steering_rad,
                                     double grid_step_rad) {
    if (!(grid_step_rad > 0.0)) throw std::invalid_argument("grid step must be positive");
    std::vector<std::vector<PatternPoint>> realized, ideal;
    realized.reserve(steering_rad.size());
    ideal.reserve(steering_rad.size());
    const ElementModel ideal_model = ElementModel::ideal();
    for (double steer : steering_rad) {
        BeamScenario sc = scenario;
        sc.steering_rad = steer;
        sc.validate();
        // grid spanning (-pi/2, pi/2), shifted to land on the steered angle
        std::vector<double> grid;
        const double lim = kPi / 2.0 - 1e-6;
        double start = steer;
        while (start - grid_step_rad > -lim) start -= grid_step_rad;
        for (double a = start; a < lim; a += grid_step_rad) grid.push_back(a);

        const std::vector<PhasorTarget> w = steering_weights(sc);
        realized.push_back(array_factor(apply_element_model(w, sc.model),
                                        sc.geometry, grid));
        ideal.push_back(array_factor(apply_element_model(w, ideal_model),
                                     sc.geometry, grid));
    }
    return beam_error_metrics(realized, ideal, steering_rad);
}

}  // namespace mpibeam
