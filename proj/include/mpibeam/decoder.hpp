#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mpibeam/mp_core.hpp"

namespace mpibeam {

/// One input step to the MP logic decoder. amp_code is a bits-wide unsigned
/// code where the all-ones pattern is reserved to mean full scale N = 2^bits
/// (one count beyond the code range). phase_code is an unsigned fixed-point
/// fraction of a full turn (binary angular measure).
struct DecoderInput {
    bool beam_load = false;  // control bit: 1 = program beam weight
    std::uint32_t amp_code = 0;
    std::uint32_t phase_code = 0;
};

struct DecoderConfig {
    int phase_count = 16;
    int bits = 16;            // amplitude resolution k, N = 2^k
    int unary_bits = 4;       // MSB sub-array width; LSBs are C-2C
    int phase_code_bits = 16;
    int active_bits = 0;      // 0 = all; else only the upper amplitude bits
    void validate() const;
};

/// Stored spatial weighting of one element.
struct BeamLatch {
    double amplitude = 0.0;  // fraction of full scale
    double phase = 0.0;      // radians
    bool valid = false;

    static BeamLatch identity() { return {1.0, 0.0, true}; }
};

/// Thermometer word over 2^unary_bits - 1 MSB slices plus the C-2C binary
/// word. The binary value spans [0, 2^binary_bits]: the top value is one
/// beyond the physical bit field and stands for the implicit extra state
/// that carries full scale (all-unary plus all-binary).
struct SegmentedCode {
    std::uint32_t thermometer = 0;
    std::uint32_t binary = 0;
};

/// Decoded bit-exact control word for one element and step.
struct ElementCommand {
    int phase_a = 0;  // basis index of the leading selected phase
    int phase_b = 0;
    std::uint32_t therm_sel = 0;  // thermometer of n1 (cells on phi_A)
    std::uint32_t therm_en = 0;   // thermometer of n1+n2 (enabled cells)
    std::uint32_t c2c_sel = 0;
    std::uint32_t c2c_en = 0;
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
};

/// Indices (A, B) of the two adjacent basis phases around theta, with
/// phi_B = phi_A + 2pi/M (mod 2pi). theta is wrapped into [0, 2pi).
std::pair<int, int> select_phases(double theta, int phase_count);

/// Product of amplitudes, sum of phases (mod 2pi). Throws if the latch was
/// never programmed.
PhasorTarget combine(const BeamLatch& beam, const PhasorTarget& modulation);

SegmentedCode encode_weight(std::int64_t n, int bits, int unary_bits = 4);
std::int64_t decode_weight(const SegmentedCode& code, int bits, int unary_bits = 4);

/// Sequential golden model of one element's decoder. Not safe to drive from
/// two threads; distinct elements are independent instances.
class MpDecoder {
  public:
    explicit MpDecoder(const DecoderConfig& cfg);

    ElementCommand step(const DecoderInput& input);
    const BeamLatch& latch() const { return latch_; }
    const DecoderConfig& config() const { return cfg_; }

    double decode_amplitude(std::uint32_t amp_code) const;  // fraction of N
    double decode_phase(std::uint32_t phase_code) const;    // radians

  private:
    DecoderConfig cfg_;
    BeamLatch latch_;
};

/// Vector-file line: `ctrl amp_code phase_code | selA selB therm_sel
/// therm_en c2c_sel c2c_en`, all words hexadecimal, MSB-first bit order.
std::string format_vector_line(const DecoderInput& in, const ElementCommand& cmd);
bool parse_vector_line(const std::string& line, DecoderInput& in, ElementCommand& cmd);

}  // namespace mpibeam
