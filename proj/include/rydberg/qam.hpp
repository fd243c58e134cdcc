#pragma once

// Square Gray-coded QAM with unit average symbol energy.
//
// A symbol's bits are read MSB first; the first half drives the in-phase
// axis, the second half the quadrature axis. On each axis the bit group is a
// reflected Gray code of the level index L, and level L sits at amplitude
// (sqrt(M) - 1 - 2L) before normalisation, so the all-zero group is the most
// positive level. The constellation index of a point is its bit pattern read
// as an unsigned integer.

#include "rydberg/errors.hpp"
#include "rydberg/random.hpp"

#include <bit>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace rydberg::qam {

using cd = std::complex<double>;

inline bool is_supported_order(int order) { return order == 4 || order == 16 || order == 64; }

inline int bits_per_symbol(int order) {
    if (!is_supported_order(order)) throw ArgumentError("qam: order must be 4, 16 or 64");
    return std::countr_zero(static_cast<unsigned>(order));
}

inline unsigned gray_to_binary(unsigned g) {
    unsigned b = 0;
    for (; g != 0; g >>= 1) b ^= g;
    return b;
}

/// Constellation point for index `index` (bit pattern, MSB first).
inline cd constellation_point(unsigned index, int order) {
    const int m = bits_per_symbol(order);
    const int half = m / 2;
    const int side = 1 << half;
    const unsigned i_gray = index >> half;
    const unsigned q_gray = index & ((1U << half) - 1U);
    const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);
    const auto level = [&](unsigned gray) { return (side - 1) - 2.0 * gray_to_binary(gray); };
    return {level(i_gray) * scale, level(q_gray) * scale};
}

inline std::vector<cd> constellation(int order) {
    std::vector<cd> points(static_cast<std::size_t>(order));
    for (int k = 0; k < order; ++k) points[static_cast<std::size_t>(k)] = constellation_point(static_cast<unsigned>(k), order);
    return points;
}

inline std::vector<cd> qam_map(std::span<const std::uint8_t> bits, int order) {
    const auto m = static_cast<std::size_t>(bits_per_symbol(order));
    if (bits.size() % m != 0) throw ArgumentError("qam_map: bit count not divisible by bits per symbol");
    const auto table = constellation(order);
    std::vector<cd> symbols;
    symbols.reserve(bits.size() / m);
    for (std::size_t s = 0; s < bits.size(); s += m) {
        unsigned index = 0;
        for (std::size_t b = 0; b < m; ++b) index = (index << 1) | (bits[s + b] & 1U);
        symbols.push_back(table[index]);
    }
    return symbols;
}

/// Minimum-distance hard decision; ties resolve to the smaller index.
inline Bits qam_demap(std::span<const cd> symbols, int order) {
    const int m = bits_per_symbol(order);
    const auto table = constellation(order);
    Bits bits;
    bits.reserve(symbols.size() * static_cast<std::size_t>(m));
    for (const cd& y : symbols) {
        unsigned best = 0;
        double best_dist = std::norm(y - table[0]);
        for (unsigned k = 1; k < table.size(); ++k) {
            const double d = std::norm(y - table[k]);
            if (d < best_dist) {
                best_dist = d;
                best = k;
            }
        }
        for (int b = m - 1; b >= 0; --b) bits.push_back(static_cast<std::uint8_t>((best >> b) & 1U));
    }
    return bits;
}

inline double minimum_distance(int order) {
    return 2.0 / std::sqrt(2.0 * (order - 1) / 3.0);
}

}  // namespace rydberg::qam
