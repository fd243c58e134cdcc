#include "rydberg/fft.hpp"
#include "rydberg/frame_io.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/qam.hpp"
#include "rydberg/random.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace rydberg;
using namespace rydberg::ofdm;
using cd = std::complex<double>;

namespace {

OfdmConfig config_n(int n, PilotScheme pilot = PilotScheme::comb()) {
    OfdmConfig c;
    c.n_subcarriers = n;
    c.pilot = pilot;
    return c;
}

SubcarrierGrid random_grid(const OfdmConfig& c, std::int64_t index, std::uint64_t seed) {
    const auto m = static_cast<std::size_t>(qam::bits_per_symbol(c.qam_order));
    const auto bits = random_bits(data_bins(c, index) * m, seed);
    return build_grid(qam::qam_map(bits, c.qam_order), c, index);
}

}  // namespace

// --- QAM -------------------------------------------------------------------

TEST(Qam, QpskZeroBits) {
    const Bits b = {0, 0};
    const auto s = qam::qam_map(b, 4);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_NEAR(s[0].real(), 1.0 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(s[0].imag(), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Qam, QpskGrayTable) {
    // Per-axis reflected Gray code: bit 0 -> +1, bit 1 -> -1; first bit on I.
    const double a = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(qam::constellation_point(0b01, 4) - cd(a, -a)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(qam::constellation_point(0b10, 4) - cd(-a, a)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(qam::constellation_point(0b11, 4) - cd(-a, -a)), 0.0, 1e-15);
}

TEST(Qam, UnitAverageEnergy) {
    for (int order : {4, 16, 64}) {
        double e = 0;
        for (const cd& p : qam::constellation(order)) e += std::norm(p);
        EXPECT_NEAR(e / order, 1.0, 1e-12) << order;
    }
}

TEST(Qam, NeighboursDifferInOneBit) {
    for (int order : {4, 16, 64}) {
        const auto pts = qam::constellation(order);
        const double dmin = qam::minimum_distance(order);
        for (unsigned i = 0; i < pts.size(); ++i)
            for (unsigned j = i + 1; j < pts.size(); ++j)
                if (std::abs(std::abs(pts[i] - pts[j]) - dmin) < 1e-9) {
                    EXPECT_EQ(std::popcount(i ^ j), 1);
                }
    }
}

TEST(Qam, RoundTripRandomBlocks) {
    std::mt19937_64 rng(11);
    for (int order : {4, 16, 64}) {
        const int m = qam::bits_per_symbol(order);
        for (int block = 0; block < 10000; ++block) {
            Bits b(static_cast<std::size_t>(m) * 4);
            for (auto& v : b) v = rng() & 1U;
            EXPECT_EQ(qam::qam_demap(qam::qam_map(b, order), order), b);
        }
    }
}

TEST(Qam, NoiseBelowHalfMinimumDistanceIsCorrected) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi);
    for (int order : {4, 16, 64}) {
        const double r = 0.49 * qam::minimum_distance(order);
        const auto pts = qam::constellation(order);
        for (unsigned k = 0; k < pts.size(); ++k) {
            const cd y = pts[k] + std::polar(r, angle(rng));
            const auto bits = qam::qam_demap(std::span(&y, 1), order);
            unsigned idx = 0;
            for (auto b : bits) idx = (idx << 1) | b;
            EXPECT_EQ(idx, k);
        }
    }
}

TEST(Qam, TieBreaksToLowerIndex) {
    // Midpoint of points 0 (+,+) and 1 (+,-) is on the Q decision boundary.
    const cd y = (qam::constellation_point(0, 4) + qam::constellation_point(1, 4)) / 2.0;
    EXPECT_EQ(qam::qam_demap(std::span(&y, 1), 4), (Bits{0, 0}));
}

TEST(Qam, LengthMismatchRejected) {
    const Bits b = {1, 0, 1};
    EXPECT_THROW(qam::qam_map(b, 4), ArgumentError);
    EXPECT_THROW(qam::qam_map(b, 8), ArgumentError);
}

// --- Grid ------------------------------------------------------------------

TEST(Grid, CombCounts) {
    const auto c = config_n(256);
    EXPECT_EQ(c.usable_bins(), 127);
    const auto mask = pilot_mask(c, 0);
    EXPECT_EQ(std::count(mask.begin(), mask.end(), 1), 32);
    for (std::size_t k = 0; k < mask.size(); ++k) EXPECT_EQ(mask[k], k % 4 == 0 ? 1 : 0);
    for (int n : {256, 512, 1024}) {
        const auto cn = config_n(n);
        const auto mk = pilot_mask(cn, 3);
        EXPECT_EQ(static_cast<int>(std::count(mk.begin(), mk.end(), 1)), (cn.usable_bins() + 3) / 4);
    }
}

TEST(Grid, BlockPeriod) {
    const auto c = config_n(1024, PilotScheme::block());
    EXPECT_EQ(data_bins(c, 4), 0u);
    EXPECT_EQ(data_bins(c, 5), 511u);
    const auto g = build_grid({}, c, 4);
    EXPECT_EQ(g.pilot_count(), 511u);
    for (std::int64_t s = 0; s < 40; ++s) EXPECT_EQ(is_pilot_symbol(c.pilot, s), s % 4 == 0);
}

TEST(Grid, WrongDataCountRejected) {
    const auto c = config_n(256);
    std::vector<cd> data(10);
    EXPECT_THROW(build_grid(data, c, 0), ArgumentError);
}

TEST(Grid, PilotsAreDeterministicQpsk) {
    const auto c = config_n(512);
    const auto a = pilot_values(c, 7), b = pilot_values(c, 7), d = pilot_values(c, 8);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, d);
    for (const cd& p : a) EXPECT_NEAR(std::abs(p), 1.0, 1e-12);
}

// --- Synthesis -------------------------------------------------------------

TEST(Synthesis, HermitianExtension) {
    const auto c = config_n(256);
    const auto g = random_grid(c, 0, 3);
    const auto x = hermitian_extend(g);
    ASSERT_EQ(x.size(), 256u);
    EXPECT_EQ(x[0], cd(0, 0));
    EXPECT_EQ(x[128], cd(0, 0));
    for (std::size_t k = 1; k < 128; ++k) {
        EXPECT_EQ(x[k], g.usable[k - 1]);
        EXPECT_EQ(x[256 - k], std::conj(x[k]));
    }
}

TEST(Synthesis, ZeroGridGivesZeroSignal) {
    const auto c = config_n(256, PilotScheme::block());
    SubcarrierGrid g;
    g.usable.assign(127, cd(0, 0));
    g.pilot_mask.assign(127, 0);
    g.symbol_index = 1;
    for (const cd& v : hermitian_extend(g)) EXPECT_EQ(v, cd(0, 0));
    for (const cd& v : synthesize_body(g, c)) EXPECT_EQ(std::abs(v), 0.0);
    const auto f = modulate(g, c);
    for (double s : f.samples) EXPECT_EQ(s, f.bias);
}

TEST(Synthesis, SingleBinIsCosine) {
    const int n = 256;
    SubcarrierGrid g;
    g.usable.assign(n / 2 - 1, cd(0, 0));
    g.pilot_mask.assign(n / 2 - 1, 0);
    g.usable[0] = 1.0;
    const auto x = fft::inverse_dft(hermitian_extend(g));
    for (int t = 0; t < n; ++t) {
        EXPECT_NEAR(x[t].real(), 2.0 / n * std::cos(2 * std::numbers::pi * t / n), 1e-15);
        EXPECT_NEAR(x[t].imag(), 0.0, 1e-15);
    }
}

TEST(Synthesis, RealResidualProperty) {
    for (int n : {256, 512, 1024}) {
        const auto c = config_n(n);
        for (std::uint64_t s = 0; s < 10; ++s) {
            const auto body = synthesize_body(random_grid(c, 0, s), c);
            double max_im = 0, max_re = 0;
            for (const cd& v : body) {
                max_im = std::max(max_im, std::abs(v.imag()));
                max_re = std::max(max_re, std::abs(v.real()));
            }
            EXPECT_LT(max_im, 1e-9 * max_re);
        }
    }
}

TEST(Synthesis, ParsevalScaling) {
    const auto c = config_n(512);
    const auto g = random_grid(c, 0, 9);
    double freq = 0;
    for (const cd& v : hermitian_extend(g)) freq += std::norm(v);
    double time = 0;
    for (const cd& v : synthesize_body(g, c)) time += std::norm(v);
    EXPECT_NEAR(time, freq, 1e-9 * freq);
}

TEST(Modulate, FrameLengthAndPrefix) {
    auto c = config_n(256);
    EXPECT_EQ(c.frame_length(), 1152);
    EXPECT_EQ(c.cp_len(), 128);
    const auto g = random_grid(c, 0, 1);
    const auto raw = unclipped_frame(g, c);
    ASSERT_EQ(raw.size(), 1152u);
    for (int k = 0; k < c.cp_len(); ++k) EXPECT_EQ(raw[k], raw[raw.size() - c.cp_len() + k]);
    const auto f = modulate(g, c);
    EXPECT_EQ(f.samples.size(), 1152u);
}

TEST(Modulate, PeakSafeBiasIsExactlyNonnegative) {
    for (int n : {256, 1024}) {
        const auto c = config_n(n);
        for (std::uint64_t s = 0; s < 5; ++s) {
            const auto f = modulate(random_grid(c, 0, s), c);
            EXPECT_GE(*std::min_element(f.samples.begin(), f.samples.end()), 0.0);
            EXPECT_EQ(*std::min_element(f.samples.begin(), f.samples.end()), 0.0);
            EXPECT_GT(f.bias, 0.0);
        }
    }
}

TEST(Modulate, FixedSigmaBias) {
    auto c = config_n(256);
    c.dc_bias = {BiasMode::FixedSigma, 3.0};
    const auto f = modulate(random_grid(c, 0, 2), c);
    EXPECT_GE(*std::min_element(f.samples.begin(), f.samples.end()), 0.0);
    EXPECT_GT(f.bias, 0.0);
}

// --- Clipping --------------------------------------------------------------

TEST(Clip, HandExample) {
    const std::vector<double> s = {3, -3, 1, -1};
    const auto y = clip(s, 0.0);
    const double a = std::sqrt(5.0);
    EXPECT_NEAR(y[0], a, 1e-12);
    EXPECT_NEAR(y[1], -a, 1e-12);
    EXPECT_EQ(y[2], 1.0);
    EXPECT_EQ(y[3], -1.0);
}

TEST(Clip, WithinThresholdIsIdentity) {
    const std::vector<double> s = {1, -1, 1, -1, 0.5};
    EXPECT_EQ(clip(s, 5.0), s);
    EXPECT_EQ(clip_papr_cap(s, 5.0), s);
}

TEST(Clip, AllZeroUnchanged) {
    const std::vector<double> z(16, 0.0);
    EXPECT_EQ(clip(z, 5.0), z);
    EXPECT_EQ(clip_papr_cap(z, 5.0), z);
}

TEST(Clip, EnergyNeverIncreases) {
    const auto c = config_n(512);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = unclipped_frame(random_grid(c, 0, s), c);
        for (double db : {0.0, 3.0, 5.0, 8.0}) {
            const auto y = clip(x, db);
            const auto z = clip_papr_cap(x, db);
            EXPECT_LE(mean_power(y), mean_power(x));
            EXPECT_LE(mean_power(z), mean_power(x));
        }
        const auto same = clip(x, 60.0);
        EXPECT_EQ(mean_power(same), mean_power(x));
    }
}

TEST(Clip, PaprCapHoldsOnRandomFrames) {
    for (int n : {256, 512, 1024}) {
        const auto c = config_n(n);
        for (std::uint64_t s = 0; s < 30; ++s) {
            const auto x = unclipped_frame(random_grid(c, 0, s), c);
            EXPECT_LE(papr(clip_papr_cap(x, 5.0)), 5.0 + 1e-9);
        }
    }
}

TEST(Clip, InputPowerReferenceExceedsCap) {
    // The input-power reference lowers the mean power along with the peaks,
    // so the resulting PAPR lands above the threshold.
    const auto c = config_n(1024);
    const auto x = unclipped_frame(random_grid(c, 0, 4), c);
    EXPECT_GT(papr(clip(x, 5.0)), 5.0);
}

TEST(Papr, Examples) {
    const std::vector<double> constant(8, 2.0);
    EXPECT_NEAR(papr(constant), 0.0, 1e-12);
    const std::vector<double> impulse = {1, 0, 0, 0};
    EXPECT_NEAR(papr(impulse), 10 * std::log10(4.0), 1e-12);
    std::vector<double> s = {0.3, -1.2, 0.8, 2.0, -0.1};
    const double p = papr(s);
    for (double c : {-3.0, 0.5, 7.0}) {
        auto t = s;
        for (double& v : t) v *= c;
        EXPECT_NEAR(papr(t), p, 1e-12);
    }
    const std::vector<double> zero(4, 0.0);
    EXPECT_THROW(papr(zero), NumericalError);
}

// --- Framing helpers -------------------------------------------------------

TEST(Plan, PaddingFillsWholeSymbols) {
    for (auto pilot : {PilotScheme::comb(), PilotScheme::block()}) {
        const auto c = config_n(256, pilot);
        for (std::size_t bits : {1u, 190u, 191u, 1000u, 12345u}) {
            const auto p = plan_frames(bits, c);
            std::size_t cap = 0;
            for (std::size_t s = 0; s < p.symbols; ++s) cap += data_bins(c, static_cast<std::int64_t>(s)) * 2;
            EXPECT_EQ(cap, bits + p.padding_bits);
            EXPECT_LT(p.padding_bits, 2 * 127u);
        }
    }
}

TEST(FrameDump, BinaryRoundTripAndLayout) {
    const auto c = config_n(256);
    std::vector<double> samples;
    for (int s = 0; s < 3; ++s) {
        const auto f = modulate(random_grid(c, s, 5), c);
        samples.insert(samples.end(), f.samples.begin(), f.samples.end());
    }
    const auto dump = io::make_frame_dump(c, samples);
    EXPECT_EQ(dump.frame_count, 3u);
    std::stringstream buf;
    io::write_frame_dump(buf, dump);
    const std::string bytes = buf.str();
    ASSERT_GE(bytes.size(), 32u);
    EXPECT_EQ(bytes.substr(0, 8), "RYDBFRM1");
    std::uint64_t json_len = 0;
    for (int i = 0; i < 8; ++i) json_len |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[8 + i])) << (8 * i);
    EXPECT_EQ(bytes.size(), 32 + json_len + 8 * samples.size());
    const auto back = io::read_frame_dump(buf);
    EXPECT_EQ(back.samples, samples);
    EXPECT_EQ(back.frame_count, 3u);
    EXPECT_EQ(back.header.at("ofdm").at("n_subcarriers"), 256);
}

TEST(FrameDump, RejectsPartialFramesAndBadMagic) {
    const auto c = config_n(256);
    std::vector<double> s(100, 0.0);
    EXPECT_THROW(io::make_frame_dump(c, s), FramingError);
    std::stringstream bad("NOTAFRAMEFILE..................................");
    EXPECT_THROW(io::read_frame_dump(bad), FramingError);
}

TEST(FrameDump, CsvExport) {
    io::FrameDump d;
    d.samples = {0.5, 1.5, 2.5, 3.5};
    d.frame_count = 2;
    std::ostringstream out;
    io::write_frame_csv(out, d);
    EXPECT_EQ(out.str(), "frame,sample,value\n0,0,0.5\n0,1,1.5\n1,0,2.5\n1,1,3.5\n");
}

TEST(Config, ValidationRejectsOffSpecValues) {
    OfdmConfig c;
    c.n_subcarriers = 128;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = OfdmConfig{};
    c.oversampling = 2;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = OfdmConfig{};
    c.qam_order = 8;
    EXPECT_THROW(c.validate(), ArgumentError);
    c = OfdmConfig{};
    EXPECT_EQ(c.cp_len_baseband(), 128);
    EXPECT_EQ(c.carrier_hz, 2.911e9);
}
