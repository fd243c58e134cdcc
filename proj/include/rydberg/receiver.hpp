#pragma once

// Receiver chain: bias removal, CP strip, FFT, least-squares pilot channel
// estimation, zero-forcing equalisation, hard QAM demapping and BER.
// Frame timing is ideal.

#include "rydberg/errors.hpp"
#include "rydberg/fft.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/qam.hpp"
#include "rydberg/random.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace rydberg::rx {

using cd = std::complex<double>;

inline constexpr double kDegeneratePilot = 1e-12;
inline constexpr double kDegenerateEstimate = 1e-9;

/// Received samples -> one grid per frame. `first_symbol` numbers the first
/// frame so pilot masks line up with the transmitter.
inline std::vector<ofdm::SubcarrierGrid> demodulate(std::span<const double> samples, const ofdm::OfdmConfig& config,
                                                    double bias, std::int64_t first_symbol = 0) {
    config.validate();
    const auto frame_len = static_cast<std::size_t>(config.frame_length());
    if (samples.size() % frame_len != 0)
        throw FramingError("demodulate: " + std::to_string(samples.size()) + " samples is not a whole number of " +
                           std::to_string(frame_len) + "-sample frames");
    const auto cp = static_cast<std::size_t>(config.cp_len());
    const auto m = static_cast<std::size_t>(config.fft_size());
    const auto k_bins = static_cast<std::size_t>(config.usable_bins());

    std::vector<ofdm::SubcarrierGrid> grids;
    grids.reserve(samples.size() / frame_len);
    std::vector<cd> body(m);
    for (std::size_t start = 0; start < samples.size(); start += frame_len) {
        for (std::size_t t = 0; t < m; ++t) body[t] = cd{samples[start + cp + t] - bias, 0.0};
        const auto spectrum = fft::unitary_dft(body, fft::Direction::Forward);
        ofdm::SubcarrierGrid grid;
        grid.symbol_index = first_symbol + static_cast<std::int64_t>(grids.size());
        grid.pilot_mask = ofdm::pilot_mask(config, grid.symbol_index);
        grid.usable.assign(spectrum.begin() + 1, spectrum.begin() + 1 + static_cast<std::ptrdiff_t>(k_bins));
        grids.push_back(std::move(grid));
    }
    return grids;
}

struct ChannelEstimate {
    std::vector<cd> gains;  // one per usable bin
    ofdm::PilotScheme source_scheme{};
    std::int64_t symbol_index = 0;

    std::size_t degenerate_count() const {
        std::size_t n = 0;
        for (const cd& g : gains) n += std::abs(g) < kDegenerateEstimate ? 1 : 0;
        return n;
    }
};

namespace detail {

inline std::vector<cd> pilot_ratios(const ofdm::SubcarrierGrid& grid, const std::vector<cd>& pilots) {
    std::vector<cd> h(grid.usable.size(), cd{0.0, 0.0});
    for (std::size_t k = 0; k < grid.usable.size(); ++k) {
        if (!grid.pilot_mask[k]) continue;
        if (std::abs(pilots[k]) < kDegeneratePilot) throw NumericalError("ls_estimate: degenerate pilot symbol");
        h[k] = grid.usable[k] / pilots[k];
    }
    return h;
}

// Linear interpolation between pilot bins; bins outside the first/last pilot
// hold the nearest pilot's estimate.
inline void interpolate_comb(std::vector<cd>& h, const std::vector<std::uint8_t>& mask) {
    std::vector<std::size_t> at;
    for (std::size_t k = 0; k < mask.size(); ++k)
        if (mask[k]) at.push_back(k);
    if (at.empty()) throw ArgumentError("ls_estimate: comb symbol without pilots");
    for (std::size_t k = 0; k < at.front(); ++k) h[k] = h[at.front()];
    for (std::size_t k = at.back() + 1; k < h.size(); ++k) h[k] = h[at.back()];
    for (std::size_t p = 0; p + 1 < at.size(); ++p) {
        const std::size_t a = at[p], b = at[p + 1];
        for (std::size_t k = a + 1; k < b; ++k) {
            const double t = static_cast<double>(k - a) / static_cast<double>(b - a);
            h[k] = h[a] + t * (h[b] - h[a]);
        }
    }
}

}  // namespace detail

/// Least-squares estimate H = Y / X at pilot bins. Comb: linear interpolation
/// across frequency. Block: the full-symbol estimate of each pilot symbol is
/// held for the data symbols that follow it. Feed grids in symbol order.
class LsEstimator {
public:
    explicit LsEstimator(const ofdm::OfdmConfig& config) : config_(config) {}

    ChannelEstimate next(const ofdm::SubcarrierGrid& grid) {
        ChannelEstimate est;
        est.source_scheme = config_.pilot;
        est.symbol_index = grid.symbol_index;
        if (config_.pilot.kind == ofdm::PilotKind::Comb) {
            est.gains = detail::pilot_ratios(grid, ofdm::pilot_values(config_, grid.symbol_index));
            detail::interpolate_comb(est.gains, grid.pilot_mask);
        } else if (ofdm::is_pilot_symbol(config_.pilot, grid.symbol_index)) {
            held_ = detail::pilot_ratios(grid, ofdm::pilot_values(config_, grid.symbol_index));
            est.gains = *held_;
        } else {
            if (!held_) throw ArgumentError("ls_estimate: data symbol precedes the first block pilot");
            est.gains = *held_;
        }
        return est;
    }

private:
    ofdm::OfdmConfig config_;
    std::optional<std::vector<cd>> held_;
};

inline std::vector<ChannelEstimate> ls_estimate(std::span<const ofdm::SubcarrierGrid> grids,
                                                const ofdm::OfdmConfig& config) {
    LsEstimator estimator(config);
    std::vector<ChannelEstimate> out;
    out.reserve(grids.size());
    for (const auto& grid : grids) out.push_back(estimator.next(grid));
    return out;
}

struct EqualizedSymbols {
    std::vector<cd> data;  // non-pilot bins, ascending
    std::size_t degenerate_bins = 0;
};

/// Divide data bins by the estimate; bins with |H| < 1e-9 are erased to 0
/// and counted.
inline EqualizedSymbols zf_equalize(const ofdm::SubcarrierGrid& grid, const ChannelEstimate& est) {
    if (est.gains.size() != grid.usable.size()) throw ArgumentError("zf_equalize: estimate length mismatch");
    EqualizedSymbols out;
    for (std::size_t k = 0; k < grid.usable.size(); ++k) {
        if (grid.pilot_mask[k]) continue;
        if (!std::isfinite(est.gains[k].real()) || !std::isfinite(est.gains[k].imag()))
            throw NumericalError("zf_equalize: non-finite channel estimate");
        if (std::abs(est.gains[k]) < kDegenerateEstimate) {
            out.data.push_back(cd{0.0, 0.0});
            ++out.degenerate_bins;
        } else {
            out.data.push_back(grid.usable[k] / est.gains[k]);
        }
    }
    return out;
}

using qam::qam_demap;

struct BerReport {
    std::uint64_t bit_errors = 0;
    std::uint64_t bits_total = 0;
    double ber = 0.0;
    std::uint64_t degenerate_bins = 0;
    std::uint64_t seed = 0;

    BerReport& operator+=(const BerReport& other) {
        bit_errors += other.bit_errors;
        bits_total += other.bits_total;
        degenerate_bins += other.degenerate_bins;
        ber = bits_total == 0 ? 0.0 : static_cast<double>(bit_errors) / static_cast<double>(bits_total);
        return *this;
    }
};

inline BerReport ber(std::span<const std::uint8_t> tx, std::span<const std::uint8_t> rx) {
    if (tx.size() != rx.size()) throw ArgumentError("ber: bit streams differ in length");
    BerReport r;
    r.bits_total = tx.size();
    for (std::size_t i = 0; i < tx.size(); ++i) r.bit_errors += ((tx[i] ^ rx[i]) & 1U);
    r.ber = r.bits_total == 0 ? 0.0 : static_cast<double>(r.bit_errors) / static_cast<double>(r.bits_total);
    return r;
}

}  // namespace rydberg::rx
