#pragma once

// Real-valued (Hermitian-symmetric) OFDM transmitter for an amplitude-only
// receiver: QAM grids with comb or block pilots, 4x oversampled synthesis,
// cyclic prefix, hard clipping and DC bias.

#include "rydberg/errors.hpp"
#include "rydberg/fft.hpp"
#include "rydberg/qam.hpp"
#include "rydberg/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace rydberg::ofdm {

using cd = std::complex<double>;

enum class PilotKind { Comb, Block };

struct PilotScheme {
    PilotKind kind = PilotKind::Comb;
    int interval = 4;  // comb: bin spacing, block: symbol period

    static PilotScheme comb(int spacing = 4) { return {PilotKind::Comb, spacing}; }
    static PilotScheme block(int period = 4) { return {PilotKind::Block, period}; }
    friend bool operator==(const PilotScheme&, const PilotScheme&) = default;
};

enum class SampleRate { Rate48k, Rate384k };

/// Sampling rate of the oversampled real waveform, Hz.
constexpr double sample_rate_hz(SampleRate r) { return r == SampleRate::Rate48k ? 48e3 : 384e3; }

enum class BiasMode { PeakSafe, FixedSigma };

struct DcBias {
    BiasMode mode = BiasMode::PeakSafe;
    double sigmas = 0.0;  // FixedSigma only

    friend bool operator==(const DcBias&, const DcBias&) = default;
};

/// Which power the clip level is referenced to.
/// InputPower: A^2 = mean(s^2) * 10^(dB/10) measured before clipping.
/// PaprCap: A chosen so the clipped frame's PAPR equals the threshold.
enum class ClipReference { InputPower, PaprCap };

struct OfdmConfig {
    int n_subcarriers = 1024;
    int oversampling = 4;
    int qam_order = 4;
    PilotScheme pilot = PilotScheme::comb();
    std::optional<double> clip_threshold_db = 5.0;  // nullopt disables clipping
    ClipReference clip_reference = ClipReference::PaprCap;
    DcBias dc_bias{};
    SampleRate sample_rate_label = SampleRate::Rate48k;
    double carrier_hz = 2.911e9;  // metadata only

    friend bool operator==(const OfdmConfig&, const OfdmConfig&) = default;

    int cp_len_baseband() const { return n_subcarriers / 8; }
    int cp_len() const { return oversampling * cp_len_baseband(); }
    int fft_size() const { return oversampling * n_subcarriers; }
    int frame_length() const { return oversampling * (n_subcarriers + cp_len_baseband()); }
    int usable_bins() const { return n_subcarriers / 2 - 1; }
    double sample_rate_hz() const { return ofdm::sample_rate_hz(sample_rate_label); }

    void validate() const {
        if (n_subcarriers != 256 && n_subcarriers != 512 && n_subcarriers != 1024)
            throw ArgumentError("ofdm config: n_subcarriers must be 256, 512 or 1024");
        if (oversampling != 4) throw ArgumentError("ofdm config: oversampling is fixed at 4");
        if (!qam::is_supported_order(qam_order)) throw ArgumentError("ofdm config: qam_order must be 4, 16 or 64");
        if (pilot.interval < 1) throw ArgumentError("ofdm config: pilot interval must be >= 1");
        if (clip_threshold_db && !(*clip_threshold_db >= 0.0))
            throw ArgumentError("ofdm config: clip threshold must be >= 0 dB");
        if (dc_bias.mode == BiasMode::FixedSigma && !(dc_bias.sigmas >= 0.0))
            throw ArgumentError("ofdm config: FixedSigma bias must be nonnegative");
    }
};

// ---------------------------------------------------------------------------
// Pilots
// ---------------------------------------------------------------------------

/// Pilot sequence seed: bin k of symbol s carries QPSK point
/// (splitmix64 stream started at kPilotSeed + s, k-th output) & 3.
inline constexpr std::uint64_t kPilotSeed = 0x5259444245524721ULL;

inline bool is_pilot_symbol(const PilotScheme& scheme, std::int64_t symbol_index) {
    return scheme.kind == PilotKind::Block && symbol_index % scheme.interval == 0;
}

inline std::vector<std::uint8_t> pilot_mask(const OfdmConfig& config, std::int64_t symbol_index) {
    const auto k = static_cast<std::size_t>(config.usable_bins());
    std::vector<std::uint8_t> mask(k, 0);
    if (config.pilot.kind == PilotKind::Comb) {
        for (std::size_t b = 0; b < k; b += static_cast<std::size_t>(config.pilot.interval)) mask[b] = 1;
    } else if (is_pilot_symbol(config.pilot, symbol_index)) {
        std::fill(mask.begin(), mask.end(), 1);
    }
    return mask;
}

inline std::vector<cd> pilot_values(const OfdmConfig& config, std::int64_t symbol_index) {
    const auto k = static_cast<std::size_t>(config.usable_bins());
    std::uint64_t state = kPilotSeed + static_cast<std::uint64_t>(symbol_index);
    std::vector<cd> values(k);
    for (auto& v : values) v = qam::constellation_point(static_cast<unsigned>(splitmix64(state) & 3U), 4);
    return values;
}

inline std::size_t data_bins(const OfdmConfig& config, std::int64_t symbol_index) {
    const auto mask = pilot_mask(config, symbol_index);
    return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 0));
}

// ---------------------------------------------------------------------------
// Grid and synthesis
// ---------------------------------------------------------------------------

/// Independent half of the spectrum: usable[k] sits on bin k + 1.
struct SubcarrierGrid {
    std::vector<cd> usable;
    std::vector<std::uint8_t> pilot_mask;
    std::int64_t symbol_index = 0;

    std::size_t pilot_count() const {
        return static_cast<std::size_t>(std::count(pilot_mask.begin(), pilot_mask.end(), 1));
    }

    /// Non-pilot bins in ascending order.
    std::vector<cd> data() const {
        std::vector<cd> out;
        out.reserve(usable.size() - pilot_count());
        for (std::size_t k = 0; k < usable.size(); ++k)
            if (!pilot_mask[k]) out.push_back(usable[k]);
        return out;
    }
};

inline SubcarrierGrid build_grid(std::span<const cd> data_symbols, const OfdmConfig& config,
                                 std::int64_t symbol_index) {
    config.validate();
    SubcarrierGrid grid;
    grid.symbol_index = symbol_index;
    grid.pilot_mask = pilot_mask(config, symbol_index);
    const auto pilots = pilot_values(config, symbol_index);
    const std::size_t needed = static_cast<std::size_t>(std::count(grid.pilot_mask.begin(), grid.pilot_mask.end(), 0));
    if (data_symbols.size() != needed)
        throw ArgumentError("build_grid: expected " + std::to_string(needed) + " data symbols, got " +
                            std::to_string(data_symbols.size()));
    grid.usable.resize(grid.pilot_mask.size());
    std::size_t next = 0;
    for (std::size_t k = 0; k < grid.usable.size(); ++k)
        grid.usable[k] = grid.pilot_mask[k] ? pilots[k] : data_symbols[next++];
    return grid;
}

/// Full N-point spectrum with X[0] = X[N/2] = 0 and X[N-k] = conj(X[k]).
inline std::vector<cd> hermitian_extend(const SubcarrierGrid& grid) {
    const std::size_t half = grid.usable.size() + 1;
    const std::size_t n = 2 * half;
    std::vector<cd> spectrum(n, cd{0.0, 0.0});
    for (std::size_t k = 1; k < half; ++k) {
        spectrum[k] = grid.usable[k - 1];
        spectrum[n - k] = std::conj(grid.usable[k - 1]);
    }
    return spectrum;
}

/// Complex oversampled body (before taking the real part): the Hermitian
/// spectrum zero-padded to 4N in frequency and passed through a unitary
/// inverse FFT.
inline std::vector<cd> synthesize_body(const SubcarrierGrid& grid, const OfdmConfig& config) {
    const auto spectrum = hermitian_extend(grid);
    const std::size_t n = spectrum.size();
    const auto m = static_cast<std::size_t>(config.fft_size());
    if (n != static_cast<std::size_t>(config.n_subcarriers)) throw ArgumentError("synthesize_body: grid size mismatch");
    std::vector<cd> padded(m, cd{0.0, 0.0});
    for (std::size_t k = 1; k < n / 2; ++k) {
        padded[k] = spectrum[k];
        padded[m - k] = spectrum[n - k];
    }
    return fft::unitary_dft(padded, fft::Direction::Inverse);
}

// ---------------------------------------------------------------------------
// PAPR and clipping
// ---------------------------------------------------------------------------

inline double mean_power(std::span<const double> s) {
    if (s.empty()) return 0.0;
    double acc = 0.0;
    for (double v : s) acc += v * v;
    return acc / static_cast<double>(s.size());
}

inline double papr(std::span<const double> samples) {
    if (samples.empty()) throw NumericalError("papr: empty signal");
    double peak = 0.0;
    for (double v : samples) peak = std::max(peak, v * v);
    if (peak == 0.0) throw NumericalError("papr: undefined for an all-zero signal");
    return 10.0 * std::log10(peak / mean_power(samples));
}

inline std::vector<double> clip_at(std::span<const double> samples, double limit) {
    std::vector<double> out(samples.begin(), samples.end());
    for (double& v : out) v = std::copysign(std::min(std::abs(v), limit), v);
    return out;
}

/// Hard clip at A = sqrt(mean(s^2) * 10^(threshold_db/10)), A computed once
/// from the input.
inline std::vector<double> clip(std::span<const double> samples, double threshold_db) {
    if (samples.empty()) throw ArgumentError("clip: empty signal");
    const double p = mean_power(samples);
    if (p == 0.0) return {samples.begin(), samples.end()};
    return clip_at(samples, std::sqrt(p * std::pow(10.0, threshold_db / 10.0)));
}

/// Clip level A such that A^2 = r * mean(min(s^2, A^2)), r = 10^(dB/10):
/// the unique level at which the clipped signal's PAPR equals the threshold.
inline double papr_cap_level(std::span<const double> samples, double threshold_db) {
    if (threshold_db < 0.0) throw ArgumentError("clip: PAPR cap below 0 dB is unattainable");
    const double r = std::pow(10.0, threshold_db / 10.0);
    std::vector<double> sq(samples.size());
    std::transform(samples.begin(), samples.end(), sq.begin(), [](double v) { return v * v; });
    std::sort(sq.begin(), sq.end(), std::greater<>());
    const auto m = static_cast<double>(sq.size());
    // suffix[c] = sum of sq[c..]
    std::vector<double> suffix(sq.size() + 1, 0.0);
    for (std::size_t c = sq.size(); c-- > 0;) suffix[c] = suffix[c + 1] + sq[c];
    for (std::size_t c = 0; c < sq.size(); ++c) {
        const double denom = m - r * static_cast<double>(c);
        if (denom <= 0.0) break;
        const double level_sq = r * suffix[c] / denom;
        const bool above_next = level_sq >= sq[c];
        const bool below_prev = c == 0 || level_sq <= sq[c - 1];
        if (above_next && below_prev) return std::sqrt(level_sq);
    }
    return std::sqrt(sq.back());
}

inline std::vector<double> clip_papr_cap(std::span<const double> samples, double threshold_db) {
    if (samples.empty()) throw ArgumentError("clip: empty signal");
    if (mean_power(samples) == 0.0) return {samples.begin(), samples.end()};
    return clip_at(samples, papr_cap_level(samples, threshold_db));
}

// ---------------------------------------------------------------------------
// Modulation
// ---------------------------------------------------------------------------

struct TimeFrame {
    std::vector<double> samples;  // biased, nonnegative
    double bias = 0.0;
    std::optional<double> papr_db;  // of the clipped zero-mean signal; empty for an all-zero frame
    std::int64_t symbol_index = 0;
};

/// Oversampled real frame with cyclic prefix, before clipping and bias.
inline std::vector<double> unclipped_frame(const SubcarrierGrid& grid, const OfdmConfig& config) {
    const auto body = synthesize_body(grid, config);
    const auto cp = static_cast<std::size_t>(config.cp_len());
    std::vector<double> frame;
    frame.reserve(body.size() + cp);
    for (std::size_t k = body.size() - cp; k < body.size(); ++k) frame.push_back(body[k].real());
    for (const cd& v : body) frame.push_back(v.real());
    return frame;
}

inline TimeFrame modulate(const SubcarrierGrid& grid, const OfdmConfig& config) {
    config.validate();
    auto samples = unclipped_frame(grid, config);
    if (config.clip_threshold_db) {
        samples = config.clip_reference == ClipReference::InputPower
                      ? clip(samples, *config.clip_threshold_db)
                      : clip_papr_cap(samples, *config.clip_threshold_db);
    }
    TimeFrame frame;
    frame.symbol_index = grid.symbol_index;
    if (mean_power(samples) > 0.0) frame.papr_db = papr(samples);

    double bias = 0.0;
    if (config.dc_bias.mode == BiasMode::PeakSafe) {
        const double lowest = *std::min_element(samples.begin(), samples.end());
        bias = lowest < 0.0 ? -lowest : 0.0;
        for (double& v : samples) v += bias;
    } else {
        bias = config.dc_bias.sigmas * std::sqrt(mean_power(samples));
        // Whatever the bias leaves negative is clipped at zero.
        for (double& v : samples) v = std::max(0.0, v + bias);
    }
    frame.bias = bias;
    frame.samples = std::move(samples);
    return frame;
}

/// Map a payload onto consecutive symbols starting at `first_symbol`. The
/// payload must fill whole symbols.
inline std::vector<SubcarrierGrid> build_grids(std::span<const std::uint8_t> bits, const OfdmConfig& config,
                                               std::int64_t first_symbol = 0) {
    const auto symbols = qam::qam_map(bits, config.qam_order);
    std::vector<SubcarrierGrid> grids;
    std::size_t used = 0;
    std::int64_t index = first_symbol;
    while (used < symbols.size()) {
        const std::size_t n = data_bins(config, index);
        if (used + n > symbols.size()) throw FramingError("build_grids: payload does not fill a whole symbol");
        grids.push_back(build_grid(std::span(symbols).subspan(used, n), config, index));
        used += n;
        ++index;
    }
    return grids;
}

/// Number of symbols and padding bits needed to carry `payload_bits`.
struct FramePlan {
    std::size_t symbols = 0;
    std::size_t padding_bits = 0;
};

inline FramePlan plan_frames(std::size_t payload_bits, const OfdmConfig& config) {
    const auto m = static_cast<std::size_t>(qam::bits_per_symbol(config.qam_order));
    FramePlan plan;
    std::size_t capacity = 0;
    while (capacity < payload_bits) {
        capacity += data_bins(config, static_cast<std::int64_t>(plan.symbols)) * m;
        ++plan.symbols;
    }
    plan.padding_bits = capacity - payload_bits;
    return plan;
}

}  // namespace rydberg::ofdm
