#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "mpibeam/decoder.hpp"
#include "mpibeam/rng.hpp"

using namespace mpibeam;

namespace {
constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kDeg = kPi / 180.0;
}  // namespace

TEST_CASE("select_phases walkthrough and wraparound") {
    // 210 deg between 202.5 and 225 at M=16
    auto [a, b] = select_phases(210.0 * kDeg, 16);
    CHECK(a == 9);
    CHECK(b == 10);
    CHECK(a * 22.5 == doctest::Approx(202.5));
    CHECK(b * 22.5 == doctest::Approx(225.0));

    auto [a0, b0] = select_phases(0.0, 16);
    CHECK(a0 == 0);
    CHECK(b0 == 1);

    auto [a1, b1] = select_phases(359.0 * kDeg, 16);
    CHECK(a1 == 15);
    CHECK(b1 == 0);
}

TEST_CASE("combine multiplies amplitudes and adds phases") {
    const BeamLatch beam{1.0, 30.0 * kDeg, true};
    const PhasorTarget mod = PhasorTarget::from_polar(1.0, kPi);
    const PhasorTarget out = combine(beam, mod);
    CHECK(out.amplitude == doctest::Approx(1.0));
    CHECK(out.theta == doctest::Approx(210.0 * kDeg).epsilon(1e-12));

    const PhasorTarget ident = combine(BeamLatch::identity(), mod);
    CHECK(ident.amplitude == mod.amplitude);
    CHECK(ident.theta == mod.theta);

    const PhasorTarget sq =
        combine(BeamLatch{0.5, kPi / 2.0, true}, PhasorTarget::from_polar(0.5, kPi / 2.0));
    CHECK(sq.amplitude == doctest::Approx(0.25));
    CHECK(sq.theta == doctest::Approx(kPi).epsilon(1e-12));

    CHECK_THROWS_AS(combine(BeamLatch{}, mod), std::logic_error);
}

TEST_CASE("encode_weight MSB alignment and split arithmetic") {
    const SegmentedCode a = encode_weight(5 * 4096, 16);
    CHECK(std::popcount(a.thermometer) == 5);
    CHECK(a.thermometer == 0x1Fu);
    CHECK(a.binary == 0u);

    const SegmentedCode b = encode_weight(4097, 16);
    CHECK(std::popcount(b.thermometer) == 1);
    CHECK(b.binary == 1u);
}

TEST_CASE("encode_weight full scale uses the implicit state") {
    const SegmentedCode top = encode_weight(65536, 16);
    CHECK(top.thermometer == 0x7FFFu);  // all 15 lines
    CHECK(top.binary == 4096u);         // one beyond the 12-bit field
    CHECK(decode_weight(top, 16) == 65536);
    CHECK_THROWS_AS(encode_weight(65537, 16), std::out_of_range);
}

TEST_CASE("weight codec is a bijection and the split identity holds") {
    for (std::int64_t n = 0; n <= 65536; ++n) {
        const SegmentedCode c = encode_weight(n, 16);
        CHECK(decode_weight(c, 16) == n);
        CHECK(static_cast<std::int64_t>(std::popcount(c.thermometer)) * 4096 +
                  c.binary == n);
    }
}

TEST_CASE("thermometer words are monotone in n") {
    std::uint32_t prev = 0;
    for (std::int64_t n = 0; n <= 65536; ++n) {
        const SegmentedCode c = encode_weight(n, 16);
        CHECK((c.thermometer & prev) == prev);  // never clears a set line
        CHECK((c.thermometer & (c.thermometer + 1)) == 0);  // no holes
        prev = c.thermometer;
    }
}

TEST_CASE("decode_weight rejects malformed words") {
    CHECK_THROWS_AS(decode_weight({0x5u, 0u}, 16), std::invalid_argument);  // hole
    CHECK_THROWS_AS(decode_weight({0x8000u, 0u}, 16), std::invalid_argument);
    CHECK_THROWS_AS(decode_weight({0u, 5000u}, 16), std::invalid_argument);
    // over-range binary is only the full-scale state
    CHECK_THROWS_AS(decode_weight({0x3u, 4096u}, 16), std::invalid_argument);
}

TEST_CASE("codec works for a smaller array") {
    for (std::int64_t n = 0; n <= 256; ++n) {
        CHECK(decode_weight(encode_weight(n, 8), 8) == n);
    }
}

TEST_CASE("decoder latches the beam and combines on data steps") {
    DecoderConfig cfg;
    MpDecoder dec(cfg);
    // program the beam: full weight at 30 deg
    const std::uint32_t phase30 = static_cast<std::uint32_t>(
        std::llround(30.0 / 360.0 * 65536.0));
    const ElementCommand beam_cmd = dec.step({true, 0xFFFF, phase30});
    CHECK(dec.latch().valid);
    CHECK(dec.latch().amplitude == 1.0);
    // the load step outputs the beam state alone
    CHECK(beam_cmd.n1 + beam_cmd.n2 > 0);

    // modulation at 180 deg, full amplitude: phases 202.5 / 225 selected
    const ElementCommand cmd = dec.step({false, 0xFFFF, 32768});
    CHECK(cmd.phase_a == 9);
    CHECK(cmd.phase_b == 10);
    // reconstructed amplitude at least the inscribed radius
    const PhasorTarget rt =
        reconstruct(QuantWeights{cmd.phase_a, cmd.n1, cmd.n2, 65536}, 16);
    CHECK(rt.amplitude >= std::cos(kPi / 16.0) - 1e-6);
}

TEST_CASE("zero amplitude grounds every slice") {
    MpDecoder dec(DecoderConfig{});
    dec.step({true, 0xFFFF, 0});
    const ElementCommand cmd = dec.step({false, 0, 12345});
    CHECK(cmd.n1 == 0);
    CHECK(cmd.n2 == 0);
    CHECK(cmd.therm_en == 0u);
    CHECK(cmd.c2c_en == 0u);
    CHECK(cmd.therm_sel == 0u);
    CHECK(cmd.c2c_sel == 0u);
}

TEST_CASE("data step without a programmed beam is an error") {
    MpDecoder dec(DecoderConfig{});
    CHECK_THROWS_AS(dec.step({false, 100, 100}), std::logic_error);
}

TEST_CASE("decoder pipeline equals the reference composition") {
    DecoderConfig cfg;
    MpDecoder dec(cfg);
    Rng rng(42);
    const std::int64_t n = std::int64_t{1} << cfg.bits;
    for (int i = 0; i < 3000; ++i) {
        const DecoderInput load{true, static_cast<std::uint32_t>(rng.integer(65536)),
                                static_cast<std::uint32_t>(rng.integer(65536))};
        dec.step(load);
        const DecoderInput data{false, static_cast<std::uint32_t>(rng.integer(65536)),
                                static_cast<std::uint32_t>(rng.integer(65536))};
        const ElementCommand cmd = dec.step(data);

        // reference path through the public operations
        const BeamLatch latch{dec.decode_amplitude(load.amp_code),
                              dec.decode_phase(load.phase_code), true};
        const PhasorTarget mod = PhasorTarget::from_polar(
            dec.decode_amplitude(data.amp_code), dec.decode_phase(data.phase_code));
        const PhasorTarget total = combine(latch, mod);
        const QuantWeights want =
            quantize(decompose_exact(total, cfg.phase_count, n), cfg.phase_count,
                     QuantMode::kRounding);
        REQUIRE(cmd.n1 == want.n1);
        REQUIRE(cmd.n2 == want.n2);
        REQUIRE(cmd.phase_a == want.sector);
        REQUIRE(cmd.phase_b == (want.sector + 1) % cfg.phase_count);

        // grounded slices are the balance of the array
        const std::int64_t enabled =
            decode_weight({cmd.therm_en, cmd.c2c_en}, cfg.bits, cfg.unary_bits);
        REQUIRE(enabled == cmd.n1 + cmd.n2);
        const std::int64_t sel =
            decode_weight({cmd.therm_sel, cmd.c2c_sel}, cfg.bits, cfg.unary_bits);
        REQUIRE(sel == cmd.n1);
    }
}

TEST_CASE("active-bits mask emulates a measurement-limited array") {
    DecoderConfig cfg;
    cfg.active_bits = 9;
    MpDecoder dec(cfg);
    CHECK(dec.decode_amplitude(0x0001) == 0.0);   // below the active bits
    CHECK(dec.decode_amplitude(0x007F) == 0.0);
    CHECK(dec.decode_amplitude(0x0080) == doctest::Approx(128.0 / 65536.0));
    // the all-ones reservation is unreachable when masked
    CHECK(dec.decode_amplitude(0xFFFF) == doctest::Approx(65408.0 / 65536.0));

    DecoderConfig full;
    MpDecoder dec_full(full);
    CHECK(dec_full.decode_amplitude(0xFFFF) == 1.0);
}

TEST_CASE("vector line formatting round trip") {
    MpDecoder d(DecoderConfig{});
    const DecoderInput in{true, 0xABCD, 0x1234};
    const ElementCommand cmd = d.step(in);
    const std::string line = format_vector_line(in, cmd);
    DecoderInput in2;
    ElementCommand cmd2;
    REQUIRE(parse_vector_line(line, in2, cmd2));
    CHECK(in2.beam_load == in.beam_load);
    CHECK(in2.amp_code == in.amp_code);
    CHECK(in2.phase_code == in.phase_code);
    CHECK(cmd2.phase_a == cmd.phase_a);
    CHECK(cmd2.phase_b == cmd.phase_b);
    CHECK(cmd2.therm_sel == cmd.therm_sel);
    CHECK(cmd2.therm_en == cmd.therm_en);
    CHECK(cmd2.c2c_sel == cmd.c2c_sel);
    CHECK(cmd2.c2c_en == cmd.c2c_en);
    CHECK(!parse_vector_line("not a vector line", in2, cmd2));
}
