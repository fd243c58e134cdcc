#pragma once

// Amplitude-only atomic detection channel:
//   y[t] = transfer(h[t] * s[t]) + w[t]
// with a gain process h, the readout transfer of the atomic operating point
// (shifted by the channel's RF detuning) and white Gaussian readout noise of
// variance noise_density * sample_rate / 2.

#include "rydberg/atomic.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace rydberg::channel {

struct StaticGain {
    double gain = 1.0;
    friend bool operator==(const StaticGain&, const StaticGain&) = default;
};

/// Mean-reverting random walk around 1, clamped to [kMinGain, kMaxGain]:
///   g[t+1] = clamp(g[t] + reversion * (1 - g[t]) + step_sigma * n[t])
/// reversion = 0 gives the plain random walk.
struct RandomWalkGain {
    double step_sigma = 0.0;
    double reversion = 0.0;
    std::uint64_t seed = 0;
    friend bool operator==(const RandomWalkGain&, const RandomWalkGain&) = default;
};

/// h[t] = 1 + depth * sin(2 pi t / period_samples)
struct SinusoidGain {
    double depth = 0.0;
    double period_samples = 1.0;
    friend bool operator==(const SinusoidGain&, const SinusoidGain&) = default;
};

using GainProcess = std::variant<StaticGain, RandomWalkGain, SinusoidGain>;

inline constexpr double kMinGain = 0.1;
inline constexpr double kMaxGain = 10.0;

struct ChannelModel {
    atomic::OperatingPoint readout{};
    atomic::AtomicLevelScheme scheme = atomic::AtomicLevelScheme::cesium();
    double noise_density = 0.0;
    GainProcess gain = StaticGain{};
    double rf_detuning = 0.0;
    std::uint64_t seed = 0;

    friend bool operator==(const ChannelModel&, const ChannelModel&) = default;

    void validate() const {
        if (!(noise_density >= 0.0)) throw ArgumentError("channel: noise_density must be nonnegative");
        if (auto* g = std::get_if<StaticGain>(&gain); g && !(g->gain > 0.0))
            throw ArgumentError("channel: static gain must be positive");
        if (auto* g = std::get_if<RandomWalkGain>(&gain);
            g && !(g->step_sigma >= 0.0 && g->reversion >= 0.0 && g->reversion < 1.0))
            throw ArgumentError("channel: random walk needs step_sigma >= 0 and reversion in [0, 1)");
        if (auto* g = std::get_if<SinusoidGain>(&gain); g && !(g->depth >= 0.0 && g->depth < 1.0 && g->period_samples > 0.0))
            throw ArgumentError("channel: sinusoid needs depth in [0, 1) and positive period");
        readout.validate();
        scheme.validate();
    }

    /// Noiseless unit-gain linear channel.
    static ChannelModel identity() { return {}; }

    /// Default time-varying channel: the random walk decorrelates over about
    /// two OFDM symbols and has a stationary spread of 0.3 around unit gain.
    static ChannelModel time_varying(const ofdm::OfdmConfig& config, double noise_density, std::uint64_t seed) {
        ChannelModel m;
        m.noise_density = noise_density;
        m.seed = seed;
        const double reversion = 1.0 / (2.0 * config.frame_length());
        const double spread = 0.3;
        m.gain = RandomWalkGain{spread * std::sqrt(reversion * (2.0 - reversion)), reversion, seed};
        return m;
    }
};

inline double noise_variance(const ChannelModel& model, double sample_rate_hz) {
    return model.noise_density * sample_rate_hz / 2.0;
}

namespace detail {

// Sequential generator for a gain process; state persists across frames.
class GainGenerator {
public:
    GainGenerator(const GainProcess& process, std::uint64_t channel_seed) : process_(process) {
        if (auto* g = std::get_if<RandomWalkGain>(&process_))
            engine_ = make_engine(derive_seed(channel_seed, g->seed), Stream::ChannelGain);
    }

    double next() {
        const std::uint64_t t = count_++;
        if (auto* g = std::get_if<StaticGain>(&process_)) return g->gain;
        if (auto* g = std::get_if<SinusoidGain>(&process_))
            return 1.0 + g->depth * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / g->period_samples);
        const auto& walk = std::get<RandomWalkGain>(process_);
        const double h = state_;
        state_ += walk.reversion * (1.0 - state_) + walk.step_sigma * normal_(engine_);
        state_ = std::clamp(state_, kMinGain, kMaxGain);
        return h;
    }

private:
    GainProcess process_;
    std::mt19937_64 engine_{};
    std::normal_distribution<double> normal_{};
    double state_ = 1.0;
    std::uint64_t count_ = 0;
};

}  // namespace detail

inline std::vector<double> gain_trajectory(const GainProcess& process, std::size_t n, std::uint64_t channel_seed) {
    detail::GainGenerator gen(process, channel_seed);
    std::vector<double> h(n);
    for (double& v : h) v = gen.next();
    return h;
}

/// Readout operating point with the channel's RF detuning applied.
inline atomic::OperatingPoint effective_readout(const ChannelModel& model) {
    auto op = model.readout;
    op.rf_detuning += model.rf_detuning;
    return op;
}

/// Stateful pass of consecutive frames through one channel realisation. The
/// gain process runs continuously across frames; frame k draws its readout
/// noise from its own stream derived from (seed, k).
class ChannelSession {
public:
    ChannelSession(const ChannelModel& model, double sample_rate_hz)
        : model_(model), op_(effective_readout(model)), gain_(model.gain, model.seed),
          sigma_(std::sqrt(noise_variance(model, sample_rate_hz))) {
        model_.validate();
    }

    /// Output without readout noise; advances the gain process.
    std::vector<double> noiseless(std::span<const double> samples) {
        std::vector<double> y(samples.size());
        const bool linear = op_.readout_mode == atomic::ReadoutMode::IdealEnvelope;
        for (std::size_t t = 0; t < samples.size(); ++t) {
            const double a = gain_.next() * samples[t];
            if (linear) {
                y[t] = op_.envelope_gain * a;
                continue;
            }
            if (a < 0.0)
                throw DomainError("apply_channel: negative field amplitude in EIT readout (insufficient DC bias)");
            y[t] = atomic::atomic_transfer(a, op_, model_.scheme);
        }
        return y;
    }

    /// Next frame through gain, transfer and noise.
    std::vector<double> process(std::span<const double> frame) {
        auto y = noiseless(frame);
        const std::uint64_t index = frame_++;
        if (sigma_ == 0.0) return y;
        auto engine = make_engine(model_.seed, Stream::ChannelNoise, index);
        std::normal_distribution<double> normal(0.0, sigma_);
        for (double& v : y) v += normal(engine);
        return y;
    }

    double noise_sigma() const { return sigma_; }

private:
    ChannelModel model_;
    atomic::OperatingPoint op_;
    detail::GainGenerator gain_;
    double sigma_;
    std::uint64_t frame_ = 0;
};

/// Noiseless channel output (gain process and atomic transfer only).
inline std::vector<double> noiseless_output(std::span<const double> samples, const ChannelModel& model) {
    ChannelSession session(model, 0.0);
    return session.noiseless(samples);
}

/// Burst of consecutive `frame_length`-sample frames through the channel.
inline std::vector<double> apply_channel(std::span<const double> samples, const ChannelModel& model,
                                         double sample_rate_hz, std::size_t frame_length) {
    if (frame_length == 0) throw ArgumentError("apply_channel: frame length must be positive");
    ChannelSession session(model, sample_rate_hz);
    std::vector<double> y;
    y.reserve(samples.size());
    for (std::size_t start = 0; start < samples.size(); start += frame_length) {
        const auto part = session.process(samples.subspan(start, std::min(frame_length, samples.size() - start)));
        y.insert(y.end(), part.begin(), part.end());
    }
    return y;
}

inline std::vector<double> concatenate(std::span<const ofdm::TimeFrame> frames) {
    std::vector<double> burst;
    for (const auto& f : frames) burst.insert(burst.end(), f.samples.begin(), f.samples.end());
    return burst;
}

inline std::vector<double> apply_channel(std::span<const ofdm::TimeFrame> frames, const ChannelModel& model,
                                         const ofdm::OfdmConfig& config) {
    const auto burst = concatenate(frames);
    return apply_channel(burst, model, config.sample_rate_hz(), static_cast<std::size_t>(config.frame_length()));
}

inline std::vector<double> apply_channel(const ofdm::TimeFrame& frame, const ChannelModel& model,
                                         const ofdm::OfdmConfig& config) {
    return apply_channel(std::span(&frame, 1), model, config);
}

// ---------------------------------------------------------------------------
// Link budget
// ---------------------------------------------------------------------------

struct LinkBudget {
    double bandwidth_hz = 0.0;
    double signal_power = 0.0;
    double noise_power = 0.0;
    double interference_power = 0.0;

    void validate() const {
        if (!(bandwidth_hz >= 0.0)) throw ArgumentError("link budget: bandwidth must be nonnegative");
        if (!(signal_power >= 0.0 && noise_power >= 0.0 && interference_power >= 0.0))
            throw ArgumentError("link budget: powers must be nonnegative");
    }
};

/// C = B log2(1 + S / (N + I)), bit/s.
inline double shannon_capacity(const LinkBudget& budget) {
    budget.validate();
    if (budget.signal_power == 0.0) return 0.0;
    const double impairment = budget.noise_power + budget.interference_power;
    if (impairment == 0.0) throw NumericalError("shannon_capacity: infinite capacity (S > 0 with N + I = 0)");
    return budget.bandwidth_hz * std::log2(1.0 + budget.signal_power / impairment);
}

/// 10 log10(noiseless output power / noise variance). +inf for a noiseless
/// channel, -inf for a zero-power output.
inline double effective_snr_db(const ChannelModel& model, std::span<const double> samples, double sample_rate_hz) {
    const auto y = noiseless_output(samples, model);
    const double signal = ofdm::mean_power(y);
    const double noise = noise_variance(model, sample_rate_hz);
    if (noise == 0.0) return std::numeric_limits<double>::infinity();
    if (signal == 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

inline double effective_snr_db(const ChannelModel& model, std::span<const ofdm::TimeFrame> frames,
                               const ofdm::OfdmConfig& config) {
    return effective_snr_db(model, concatenate(frames), config.sample_rate_hz());
}

/// Noise density that puts `samples` at the requested effective SNR.
inline double noise_density_for_snr(const ChannelModel& model, std::span<const double> samples,
                                    double sample_rate_hz, double snr_db) {
    const double signal = ofdm::mean_power(noiseless_output(samples, model));
    return signal / std::pow(10.0, snr_db / 10.0) / (sample_rate_hz / 2.0);
}

}  // namespace rydberg::channel
