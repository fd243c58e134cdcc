#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace rydberg {

using Bits = std::vector<std::uint8_t>;

/// SplitMix64 step. Used wherever a sequence has to be reproducible across
/// standard libraries (pilots, stream derivation).
constexpr std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derive an independent 64-bit seed for sub-stream `index` of `seed`.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (index * 0xD1B54A32D192ED03ULL);
    splitmix64(s);
    return splitmix64(s);
}

/// Stream tags keep the different consumers of one seed apart.
enum class Stream : std::uint64_t {
    PayloadBits = 1,
    PaddingBits = 2,
    ChannelNoise = 3,
    ChannelGain = 4,
    BitFlips = 5,
    Scrambler = 6,
};

inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream, std::uint64_t index = 0) {
    return std::mt19937_64{derive_seed(derive_seed(seed, static_cast<std::uint64_t>(stream)), index)};
}

inline Bits random_bits(std::size_t count, std::uint64_t seed, Stream stream = Stream::PayloadBits) {
    auto engine = make_engine(seed, stream);
    Bits bits(count);
    std::uint64_t word = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (i % 64 == 0) word = engine();
        bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
    }
    return bits;
}

}  // namespace rydberg
