#include "mpibeam/decoder.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mpibeam {

namespace {

double wrap_two_pi(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

}  // namespace

void DecoderConfig::validate() const {
    if (phase_count < 3) throw std::invalid_argument("phase count must be >= 3");
    if (bits < 1 || bits > 30) throw std::invalid_argument("bits out of range");
    if (unary_bits < 1 || unary_bits >= bits || unary_bits > 5) {
        throw std::invalid_argument("unary bits must be in [1, min(bits, 5+1))");
    }
    if (phase_code_bits < 1 || phase_code_bits > 31) {
        throw std::invalid_argument("phase code bits out of range");
    }
    if (active_bits < 0 || active_bits > bits) {
        throw std::invalid_argument("active bits out of range");
    }
}

std::pair<int, int> select_phases(double theta, int phase_count) {
    const int a = sector_index(theta, phase_count);
    return {a, (a + 1) % phase_count};
}

PhasorTarget combine(const BeamLatch& beam, const PhasorTarget& modulation) {
    if (!beam.valid) {
        throw std::logic_error("combine requested with no beam weight latched");
    }
    const double amp = beam.amplitude * modulation.amplitude;
    if (amp == 0.0) return {0.0, 0.0};
    return PhasorTarget::from_polar(amp, wrap_two_pi(beam.phase + modulation.theta));
}

SegmentedCode encode_weight(std::int64_t n, int bits, int unary_bits) {
    const std::int64_t full = std::int64_t{1} << bits;
    if (n < 0 || n > full) {
        throw std::out_of_range("weight outside [0, 2^bits]");
    }
    const int binary_bits = bits - unary_bits;
    const std::int64_t slice = std::int64_t{1} << binary_bits;
    const std::int64_t lines = (std::int64_t{1} << unary_bits) - 1;
    std::int64_t t = n >> binary_bits;
    if (t > lines) t = lines;  // full scale rides on the implicit extra state
    SegmentedCode code;
    code.thermometer = static_cast<std::uint32_t>((std::uint64_t{1} << t) - 1);
    code.binary = static_cast<std::uint32_t>(n - t * slice);
    return code;
}

std::int64_t decode_weight(const SegmentedCode& code, int bits, int unary_bits) {
    const int binary_bits = bits - unary_bits;
    const std::int64_t slice = std::int64_t{1} << binary_bits;
    const std::uint32_t lines_mask =
        static_cast<std::uint32_t>((std::uint64_t{1} << ((std::int64_t{1} << unary_bits) - 1)) - 1);
    if ((code.thermometer & ~lines_mask) != 0) {
        throw std::invalid_argument("thermometer word has bits beyond the line count");
    }
    // reject words with holes
    const std::uint32_t t = code.thermometer;
    if ((t & (t + 1)) != 0) {
        throw std::invalid_argument("thermometer word is not monotone");
    }
    if (code.binary > slice) {
        throw std::invalid_argument("binary word exceeds the slice size");
    }
    // the over-range binary value is the implicit state reserved for full
    // scale; it is only valid together with all thermometer lines set
    if (code.binary == slice && t != lines_mask) {
        throw std::invalid_argument("over-range binary word below full scale");
    }
    return static_cast<std::int64_t>(std::popcount(t)) * slice + code.binary;
}

MpDecoder::MpDecoder(const DecoderConfig& cfg) : cfg_(cfg) { cfg.validate(); }

double MpDecoder::decode_amplitude(std::uint32_t amp_code) const {
    const std::uint64_t full = std::uint64_t{1} << cfg_.bits;
    const std::uint32_t all_ones = static_cast<std::uint32_t>(full - 1);
    if (amp_code > all_ones) throw std::out_of_range("amplitude code too wide");
    std::uint32_t code = amp_code;
    if (cfg_.active_bits > 0 && cfg_.active_bits < cfg_.bits) {
        // measurement-style emulation: only the upper bits are driven, so
        // the reserved all-ones pattern cannot be formed
        code &= ~((std::uint32_t{1} << (cfg_.bits - cfg_.active_bits)) - 1);
    }
    // the all-ones code is reserved to mean full scale N
    const std::uint64_t n = (code == all_ones) ? full : code;
    return static_cast<double>(n) / static_cast<double>(full);
}

double MpDecoder::decode_phase(std::uint32_t phase_code) const {
    const std::uint64_t turns = std::uint64_t{1} << cfg_.phase_code_bits;
    if (phase_code >= turns) throw std::out_of_range("phase code too wide");
    return kTwoPi * static_cast<double>(phase_code) / static_cast<double>(turns);
}

ElementCommand MpDecoder::step(const DecoderInput& input) {
    const double amp = decode_amplitude(input.amp_code);
    const double phase = decode_phase(input.phase_code);

    PhasorTarget target;
    if (input.beam_load) {
        latch_ = {amp, phase, true};
        target = PhasorTarget::from_polar(amp, phase);
    } else {
        target = combine(latch_, PhasorTarget::from_polar(amp, phase));
    }

    const std::int64_t n = std::int64_t{1} << cfg_.bits;
    const auto [a, b] = select_phases(target.theta, cfg_.phase_count);
    const QuantWeights w = quantize(decompose_exact(target, cfg_.phase_count, n),
                                    cfg_.phase_count, QuantMode::kRounding);

    ElementCommand cmd;
    cmd.phase_a = a;
    cmd.phase_b = b;
    cmd.n1 = w.n1;
    cmd.n2 = w.n2;
    const SegmentedCode sel = encode_weight(w.n1, cfg_.bits, cfg_.unary_bits);
    const SegmentedCode en = encode_weight(w.n1 + w.n2, cfg_.bits, cfg_.unary_bits);
    cmd.therm_sel = sel.thermometer;
    cmd.c2c_sel = sel.binary;
    cmd.therm_en = en.thermometer;
    cmd.c2c_en = en.binary;
    return cmd;
}

std::string format_vector_line(const DecoderInput& in, const ElementCommand& cmd) {
    std::ostringstream os;
    os << std::hex << (in.beam_load ? 1 : 0) << ' ' << in.amp_code << ' '
       << in.phase_code << " | " << cmd.phase_a << ' ' << cmd.phase_b << ' '
       << cmd.therm_sel << ' ' << cmd.therm_en << ' ' << cmd.c2c_sel << ' '
       << cmd.c2c_en;
    return os.str();
}

bool parse_vector_line(const std::string& line, DecoderInput& in, ElementCommand& cmd) {
    std::istringstream is(line);
    is >> std::hex;
    unsigned ctrl = 0;
    std::string sep;
    if (!(is >> ctrl >> in.amp_code >> in.phase_code >> sep) || sep != "|") return false;
    if (!(is >> cmd.phase_a >> cmd.phase_b >> cmd.therm_sel >> cmd.therm_en >>
          cmd.c2c_sel >> cmd.c2c_en)) {
        return false;
    }
    in.beam_load = ctrl != 0;
    return true;
}

}  // namespace mpibeam
