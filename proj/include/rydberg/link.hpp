#pragma once

// Bit-level link: payload -> OFDM frames -> atomic channel -> receiver, plus
// the BER probe that drives codec selection.

#include "rydberg/channel.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/qam.hpp"
#include "rydberg/random.hpp"
#include "rydberg/receiver.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rydberg::link {

struct ChainResult {
    Bits received;  // payload bits only, padding stripped
    rx::BerReport report;
    std::size_t padding_bits = 0;
    std::size_t symbols = 0;
};

/// Fixed whitening sequence XORed onto the mapped bit stream. Structured
/// payloads (long runs from a source codec) otherwise produce symbols whose
/// peaks the 5 dB clip destroys.
inline constexpr std::uint64_t kScramblerSeed = 0x5343524d424c4531ULL;

inline Bits scrambler_sequence(std::size_t n) { return random_bits(n, kScramblerSeed, Stream::Scrambler); }

/// Run `payload` through the full transmitter, channel and receiver. The
/// payload is padded to whole OFDM symbols with filler bits drawn from
/// `seed`; filler is excluded from the BER. The stream is scrambled before
/// mapping and descrambled after demapping. Frames are streamed one at a time.
inline ChainResult transmit_bits(std::span<const std::uint8_t> payload, const ofdm::OfdmConfig& config,
                                 const channel::ChannelModel& model, std::uint64_t seed) {
    config.validate();
    model.validate();
    const auto plan = ofdm::plan_frames(payload.size(), config);
    const auto filler = random_bits(plan.padding_bits, seed, Stream::PaddingBits);
    const auto whitening = scrambler_sequence(payload.size() + plan.padding_bits);
    const auto m = static_cast<std::size_t>(qam::bits_per_symbol(config.qam_order));

    channel::ChannelSession session(model, config.sample_rate_hz());
    rx::LsEstimator estimator(config);
    ChainResult result;
    result.padding_bits = plan.padding_bits;
    result.symbols = plan.symbols;
    result.received.reserve(payload.size());

    Bits chunk;
    std::size_t cursor = 0;  // position in payload ++ filler
    for (std::size_t s = 0; s < plan.symbols; ++s) {
        const auto index = static_cast<std::int64_t>(s);
        const std::size_t nbits = ofdm::data_bins(config, index) * m;
        chunk.resize(nbits);
        for (std::size_t b = 0; b < nbits; ++b, ++cursor)
            chunk[b] = (cursor < payload.size() ? payload[cursor] : filler[cursor - payload.size()]) ^ whitening[cursor];
        const auto symbols = qam::qam_map(chunk, config.qam_order);
        const auto grid = ofdm::build_grid(symbols, config, index);
        const auto frame = ofdm::modulate(grid, config);
        const auto received = session.process(frame.samples);
        const auto rx_grid = rx::demodulate(received, config, frame.bias, index).front();
        const auto estimate = estimator.next(rx_grid);
        const auto equalized = rx::zf_equalize(rx_grid, estimate);
        result.report.degenerate_bins += equalized.degenerate_bins;
        const auto bits = qam::qam_demap(equalized.data, config.qam_order);
        const std::size_t start = cursor - nbits;
        for (std::size_t b = 0; b < nbits && start + b < payload.size(); ++b)
            result.received.push_back(bits[b] ^ whitening[start + b]);
    }
    const auto counted = rx::ber(payload, result.received);
    result.report.bit_errors = counted.bit_errors;
    result.report.bits_total = counted.bits_total;
    result.report.ber = counted.ber;
    result.report.seed = seed;
    return result;
}

inline constexpr std::size_t kMinProbeBits = 10'000;

/// Channel realisation used for a run seed: the model's own seed is mixed
/// with the run seed so that sweeping seeds varies every random source.
inline channel::ChannelModel seeded_channel(const channel::ChannelModel& model, std::uint64_t seed) {
    auto m = model;
    m.seed = derive_seed(model.seed, seed);
    return m;
}

/// BER of a known pseudo-random probe sequence of `n_bits` bits.
inline rx::BerReport probe(const ofdm::OfdmConfig& config, const channel::ChannelModel& model, std::size_t n_bits,
                           std::uint64_t seed, std::size_t min_bits = kMinProbeBits) {
    if (n_bits < min_bits)
        throw ArgumentError("probe_ber: " + std::to_string(n_bits) + " bits is below the statistical floor of " +
                            std::to_string(min_bits));
    const auto bits = random_bits(n_bits, seed, Stream::PayloadBits);
    return transmit_bits(bits, config, seeded_channel(model, seed), seed).report;
}

inline double probe_ber(const ofdm::OfdmConfig& config, const channel::ChannelModel& model, std::size_t n_bits,
                        std::uint64_t seed, std::size_t min_bits = kMinProbeBits) {
    return probe(config, model, n_bits, seed, min_bits).ber;
}

/// Binary symmetric channel: flip each bit independently with probability p.
inline Bits flip_bits(std::span<const std::uint8_t> bits, double p, std::uint64_t seed) {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("flip_bits: probability outside [0, 1]");
    auto engine = make_engine(seed, Stream::BitFlips);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Bits out(bits.begin(), bits.end());
    for (auto& b : out)
        if (uniform(engine) < p) b ^= 1U;
    return out;
}

}  // namespace rydberg::link
