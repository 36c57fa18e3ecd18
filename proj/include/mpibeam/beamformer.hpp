#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "mpibeam/mp_core.hpp"

namespace mpibeam {

struct ArrayGeometry {
    int count = 4;
    double spacing = 0.5;  // wavelengths
    void validate() const;
};

/// Per-element (phase code -> realized phase/amplitude) calibration data,
/// interpolated linearly in code with wraparound.
class MeasuredTable {
  public:
    struct Entry {
        int phase_code = 0;
        double phase_deg = 0.0;
        double amp_db = 0.0;
    };

    static MeasuredTable load_csv(const std::string& path, int code_bits = 9);
    static MeasuredTable ideal(int elements, int code_bits = 9, int entries = 64);

    void add(int element, const Entry& e);
    int code_bits() const { return code_bits_; }

    /// Realized complex gain (unit nominal amplitude) for a requested phase.
    std::complex<double> lookup(int element, double phase_rad) const;

  private:
    explicit MeasuredTable(int code_bits) : code_bits_(code_bits) {}
    int code_bits_ = 9;
    std::map<int, std::vector<Entry>> entries_;  // element -> sorted by code
};

enum class ElementModelKind { kIdeal, kQuantized, kMeasuredTable };

struct ElementModel {
    ElementModelKind kind = ElementModelKind::kIdeal;
    int phase_count = 16;
    int bits = 9;
    QuantMode mode = QuantMode::kRounding;
    const MeasuredTable* table = nullptr;
    /// Static per-element phase calibration, subtracted from the realized
    /// phase (off-line calibration constant).
    std::vector<double> phase_offset_rad;

    static ElementModel ideal() { return {}; }
    static ElementModel quantized(int phase_count, int bits,
                                  QuantMode mode = QuantMode::kRounding);
    static ElementModel measured(const MeasuredTable& table);
};

struct BeamScenario {
    ArrayGeometry geometry;
    double steering_rad = 0.0;  // from broadside, |angle| < pi/2
    std::vector<double> taper;  // empty = uniform
    ElementModel model;
    void validate() const;
};

/// Progressive-phase weights: element i gets phase -2pi*d*i*sin(steer) and
/// its taper amplitude.
std::vector<PhasorTarget> steering_weights(const BeamScenario& scenario);

/// Realized per-element complex gains under the element model.
std::vector<std::complex<double>> apply_element_model(
    const std::vector<PhasorTarget>& weights, const ElementModel& model);

struct PatternPoint {
    double theta_rad = 0.0;
    std::complex<double> af;  // normalized to the ideal-array peak
};

std::vector<PatternPoint> array_factor(const std::vector<std::complex<double>>& gains,
                                       const ArrayGeometry& geometry,
                                       const std::vector<double>& angles_rad);

struct BeamError {
    double steering_rad = 0.0;
    double phase_err_deg = 0.0;
    double amp_err_db = 0.0;
};

struct BeamErrorStats {
    std::vector<BeamError> points;
    double rms_phase_err_deg = 0.0;
    double rms_amp_err_db = 0.0;
};

/// Main-beam error between realized and ideal patterns per steering point:
/// phase and gain of the realized AF at the steered angle relative to the
/// ideal AF. Patterns must share their angle grids; the steered angle is
/// interpolated linearly when it falls between grid points.
BeamErrorStats beam_error_metrics(
    const std::vector<std::vector<PatternPoint>>& realized,
    const std::vector<std::vector<PatternPoint>>& ideal,
    const std::vector<double>& steering_rad);

/// Convenience driver: sweeps steering angles, synthesizing realized and
/// ideal patterns of `scenario.model` on a grid containing each steered
/// angle, and reduces to the rms metrics.
BeamErrorStats steering_sweep_errors(const BeamScenario& scenario,
                                     const std::vector<double>& steering_rad,
                                     double grid_step_rad);

}  // namespace mpibeam
