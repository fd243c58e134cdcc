#include "rydberg/channel.hpp"
#include "rydberg/link.hpp"
#include "rydberg/receiver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace rydberg;
using namespace rydberg::channel;

namespace {

std::vector<double> ramp(std::size_t n) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = 0.5 + std::sin(0.01 * static_cast<double>(i)) * 0.4;
    return s;
}

std::vector<ofdm::TimeFrame> random_frames(const ofdm::OfdmConfig& c, std::size_t count, std::uint64_t seed) {
    std::size_t n = 0;
    for (std::size_t s = 0; s < count; ++s) n += ofdm::data_bins(c, static_cast<std::int64_t>(s)) * 2;
    const auto grids = ofdm::build_grids(random_bits(n, seed), c, 0);
    std::vector<ofdm::TimeFrame> frames;
    for (const auto& g : grids) frames.push_back(ofdm::modulate(g, c));
    return frames;
}

}  // namespace

TEST(Channel, IdentityIsExact) {
    const auto s = ramp(5000);
    EXPECT_EQ(apply_channel(s, ChannelModel::identity(), 48e3, 1000), s);
}

TEST(Channel, NoiseVarianceMatchesDensity) {
    ChannelModel m;
    m.noise_density = 2e-6;
    m.seed = 99;
    const std::vector<double> s(1'000'000, 0.25);
    const auto y = apply_channel(s, m, 48e3, 4608);
    double mean = 0;
    for (std::size_t i = 0; i < s.size(); ++i) mean += y[i] - s[i];
    mean /= static_cast<double>(s.size());
    double var = 0;
    for (std::size_t i = 0; i < s.size(); ++i) var += (y[i] - s[i] - mean) * (y[i] - s[i] - mean);
    var /= static_cast<double>(s.size() - 1);
    const double expected = 2e-6 * 48e3 / 2.0;
    EXPECT_NEAR(var, expected, 0.02 * expected);
    EXPECT_NEAR(noise_variance(m, 48e3), expected, 1e-18);
}

TEST(Channel, SinusoidGainReproduced) {
    ChannelModel m;
    m.gain = SinusoidGain{0.3, 700.0};
    const auto s = ramp(3000);
    const auto y = apply_channel(s, m, 48e3, 1000);
    for (std::size_t t = 0; t < s.size(); ++t)
        EXPECT_NEAR(y[t] / s[t], 1.0 + 0.3 * std::sin(2 * std::numbers::pi * t / 700.0), 1e-9);
}

TEST(Channel, RandomWalkClampedAndDeterministic) {
    RandomWalkGain walk{0.5, 0.0, 3};
    const auto a = gain_trajectory(walk, 20000, 17);
    const auto b = gain_trajectory(walk, 20000, 17);
    EXPECT_EQ(a, b);
    for (double h : a) {
        EXPECT_GE(h, kMinGain);
        EXPECT_LE(h, kMaxGain);
    }
    EXPECT_NE(a, gain_trajectory(walk, 20000, 18));
}

TEST(Channel, GainIsContinuousAcrossFrames) {
    ChannelModel m = ChannelModel::time_varying(ofdm::OfdmConfig{}, 0.0, 5);
    const std::vector<double> ones(9000, 1.0);
    const auto burst = noiseless_output(ones, m);
    EXPECT_EQ(burst, gain_trajectory(m.gain, ones.size(), m.seed));
    // Splitting into frames through the session gives the same trajectory.
    ChannelSession session(m, 48e3);
    std::vector<double> joined;
    for (std::size_t start = 0; start < ones.size(); start += 3000) {
        const auto part = session.process(std::span(ones).subspan(start, 3000));
        joined.insert(joined.end(), part.begin(), part.end());
    }
    EXPECT_EQ(joined, burst);
}

TEST(Channel, TimeVaryingDefaultSpread) {
    const ofdm::OfdmConfig c;
    const auto m = ChannelModel::time_varying(c, 0.0, 1);
    const auto& walk = std::get<RandomWalkGain>(m.gain);
    EXPECT_DOUBLE_EQ(walk.reversion, 1.0 / (2.0 * c.frame_length()));
    // Stationary std of the AR(1) process around 1.
    const double theta = walk.reversion;
    EXPECT_NEAR(walk.step_sigma / std::sqrt(theta * (2 - theta)), 0.3, 1e-12);
}

TEST(Channel, NoiseDependsOnFrameIndexOnly) {
    ChannelModel m;
    m.noise_density = 1e-6;
    m.seed = 4;
    const std::vector<double> s(2000, 1.0);
    const auto whole = apply_channel(s, m, 48e3, 1000);
    ChannelSession session(m, 48e3);
    const auto f0 = session.process(std::span(s).subspan(0, 1000));
    const auto f1 = session.process(std::span(s).subspan(1000, 1000));
    EXPECT_TRUE(std::equal(f0.begin(), f0.end(), whole.begin()));
    EXPECT_TRUE(std::equal(f1.begin(), f1.end(), whole.begin() + 1000));
    EXPECT_NE(std::vector<double>(whole.begin(), whole.begin() + 1000),
              std::vector<double>(whole.begin() + 1000, whole.end()));
}

TEST(Channel, EitModeRejectsNegativeAmplitude) {
    ChannelModel m;
    m.readout.readout_mode = atomic::ReadoutMode::EitNonlinear;
    const std::vector<double> s = {0.1, -0.01, 0.2};
    EXPECT_THROW(apply_channel(s, m, 48e3, 3), DomainError);
    m.readout.readout_mode = atomic::ReadoutMode::IdealEnvelope;
    EXPECT_NO_THROW(apply_channel(s, m, 48e3, 3));
}

TEST(Channel, RfDetuningShiftsOperatingPoint) {
    ChannelModel m;
    m.readout.readout_mode = atomic::ReadoutMode::EitNonlinear;
    const std::vector<double> s = {0.05, 0.1, 0.2};
    const auto base = noiseless_output(s, m);
    m.rf_detuning = atomic::kTwoPi * 2e6;
    const auto detuned = noiseless_output(s, m);
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NE(base[i], detuned[i]);
    EXPECT_DOUBLE_EQ(effective_readout(m).rf_detuning, atomic::kTwoPi * 2e6);
}

TEST(Channel, ValidationErrors) {
    ChannelModel m;
    m.noise_density = -1;
    EXPECT_THROW(m.validate(), ArgumentError);
    m = ChannelModel{};
    m.gain = StaticGain{0.0};
    EXPECT_THROW(m.validate(), ArgumentError);
    m.gain = SinusoidGain{1.5, 10};
    EXPECT_THROW(m.validate(), ArgumentError);
}

TEST(Capacity, Examples) {
    EXPECT_DOUBLE_EQ(shannon_capacity({1e6, 3.0, 0.6, 0.4}), 2e6);
    EXPECT_EQ(shannon_capacity({0.0, 3.0, 1.0, 0.0}), 0.0);
    EXPECT_EQ(shannon_capacity({5e6, 0.0, 1.0, 0.0}), 0.0);
    EXPECT_EQ(shannon_capacity({5e6, 0.0, 0.0, 0.0}), 0.0);
    EXPECT_THROW(shannon_capacity({1e6, 1.0, 0.0, 0.0}), NumericalError);
    EXPECT_THROW(shannon_capacity({-1.0, 1.0, 1.0, 0.0}), ArgumentError);
}

TEST(Snr, ScalingRules) {
    ofdm::OfdmConfig c;
    c.n_subcarriers = 256;
    const auto frames = random_frames(c, 8, 3);
    ChannelModel m;
    m.noise_density = 1e-7;
    const double base = effective_snr_db(m, frames, c);
    auto doubled = frames;
    for (auto& f : doubled)
        for (double& v : f.samples) v *= 2;
    EXPECT_NEAR(effective_snr_db(m, doubled, c) - base, 6.02, 0.1);
    m.noise_density = 2e-7;
    EXPECT_NEAR(base - effective_snr_db(m, frames, c), 3.01, 0.1);
    m.noise_density = 0;
    EXPECT_TRUE(std::isinf(effective_snr_db(m, frames, c)) && effective_snr_db(m, frames, c) > 0);
    m.noise_density = 1e-7;
    const std::vector<double> zero(1152, 0.0);
    const double z = effective_snr_db(m, zero, 48e3);
    EXPECT_TRUE(std::isinf(z) && z < 0);
}

TEST(Snr, DensityForTargetSnr) {
    ofdm::OfdmConfig c;
    c.n_subcarriers = 256;
    const auto burst = concatenate(random_frames(c, 4, 8));
    ChannelModel m;
    m.noise_density = noise_density_for_snr(m, burst, 48e3, 12.0);
    EXPECT_NEAR(effective_snr_db(m, burst, 48e3), 12.0, 1e-9);
}

TEST(Snr, BerMonotoneInSnr) {
    ofdm::OfdmConfig c;
    c.n_subcarriers = 256;
    const auto burst = concatenate(random_frames(c, 8, 1));
    double prev = 1.0;
    for (int snr = 0; snr <= 30; snr += 3) {
        ChannelModel m;
        m.noise_density = noise_density_for_snr(m, burst, c.sample_rate_hz(), snr);
        double ber = 0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) ber += link::probe_ber(c, m, 100000, seed) / 3.0;
        EXPECT_LE(ber, prev + 1e-12) << "snr " << snr;
        prev = ber;
    }
    EXPECT_EQ(prev, 0.0);
}

TEST(Bandwidth, InBandNoiseGap) {
    // Noise-only frames through the receiver: per-bin noise power scales
    // with the sample rate at fixed density.
    ofdm::OfdmConfig c;
    c.n_subcarriers = 256;
    ChannelModel m;
    m.noise_density = 1e-6;
    auto in_band = [&](ofdm::SampleRate rate) {
        c.sample_rate_label = rate;
        const std::vector<double> zeros(static_cast<std::size_t>(c.frame_length()) * 40, 0.0);
        const auto y = apply_channel(zeros, m, c.sample_rate_hz(), static_cast<std::size_t>(c.frame_length()));
        double p = 0;
        std::size_t n = 0;
        for (const auto& g : rx::demodulate(y, c, 0.0))
            for (const auto& v : g.usable) p += std::norm(v), ++n;
        return p / static_cast<double>(n);
    };
    const double gap = 10 * std::log10(in_band(ofdm::SampleRate::Rate384k) / in_band(ofdm::SampleRate::Rate48k));
    EXPECT_NEAR(gap, 10 * std::log10(384.0 / 48.0), 0.2);
}
