#pragma once

// Sample and spectrum dumps.
//
// Frame dump layout (all integers little-endian):
//   0   char[8]  magic "RYDBFRM1"
//   8   u64      json_len
//   16  u64      sample_count
//   24  u64      frame_count
//   32  json_len bytes of UTF-8 JSON (the OfdmConfig plus optional extras)
//   ... sample_count IEEE-754 f64 samples

#include "rydberg/atomic.hpp"
#include "rydberg/config.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/ofdm.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rydberg::io {

inline constexpr std::array<char, 8> kFrameMagic = {'R', 'Y', 'D', 'B', 'F', 'R', 'M', '1'};

struct FrameDump {
    nlohmann::json header;  // {"ofdm": {...}, ...}
    std::vector<double> samples;
    std::uint64_t frame_count = 0;
};

namespace detail {

inline void put_u64(std::ostream& out, std::uint64_t v) {
    std::array<char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFFU);
    out.write(b.data(), 8);
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

static_assert(std::numeric_limits<double>::is_iec559);

}  // namespace detail

inline void write_frame_dump(std::ostream& out, const FrameDump& dump) {
    const std::string text = dump.header.dump();
    out.write(kFrameMagic.data(), 8);
    detail::put_u64(out, text.size());
    detail::put_u64(out, dump.samples.size());
    detail::put_u64(out, dump.frame_count);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (double s : dump.samples) detail::put_u64(out, std::bit_cast<std::uint64_t>(s));
}

inline void write_frame_dump(const std::filesystem::path& path, const FrameDump& dump) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("frame dump: cannot write " + path.string());
    write_frame_dump(out, dump);
}

inline FrameDump read_frame_dump(std::istream& in) {
    std::array<unsigned char, 32> head{};
    in.read(reinterpret_cast<char*>(head.data()), 32);
    if (in.gcount() != 32 || std::memcmp(head.data(), kFrameMagic.data(), 8) != 0)
        throw FramingError("frame dump: bad magic or truncated header");
    const auto json_len = detail::get_u64(head.data() + 8);
    const auto n = detail::get_u64(head.data() + 16);
    FrameDump dump;
    dump.frame_count = detail::get_u64(head.data() + 24);
    std::string text(json_len, '\0');
    in.read(text.data(), static_cast<std::streamsize>(json_len));
    if (static_cast<std::uint64_t>(in.gcount()) != json_len) throw FramingError("frame dump: truncated JSON header");
    dump.header = nlohmann::json::parse(text);
    std::vector<unsigned char> raw(n * 8);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::uint64_t>(in.gcount()) != raw.size()) throw FramingError("frame dump: truncated samples");
    dump.samples.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) dump.samples[i] = std::bit_cast<double>(detail::get_u64(raw.data() + 8 * i));
    return dump;
}

inline FrameDump read_frame_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("frame dump: cannot open " + path.string());
    return read_frame_dump(in);
}

/// Dump of consecutive frames of one configuration.
inline FrameDump make_frame_dump(const ofdm::OfdmConfig& config, std::span<const double> samples) {
    const auto len = static_cast<std::size_t>(config.frame_length());
    if (samples.size() % len != 0) throw FramingError("frame dump: sample count is not a whole number of frames");
    FrameDump d;
    d.header = {{"ofdm", config::to_json(config)}};
    d.samples.assign(samples.begin(), samples.end());
    d.frame_count = samples.size() / len;
    return d;
}

/// CSV with columns frame, sample, value.
inline void write_frame_csv(std::ostream& out, const FrameDump& dump) {
    const std::size_t len = dump.frame_count ? dump.samples.size() / dump.frame_count : dump.samples.size();
    out << "frame,sample,value\n" << std::setprecision(17);
    for (std::size_t i = 0; i < dump.samples.size(); ++i)
        out << (len ? i / len : 0) << ',' << (len ? i % len : i) << ',' << dump.samples[i] << '\n';
}

/// Two-column spectrum CSV at full precision.
inline void write_spectrum_csv(std::ostream& out, const atomic::EitSpectrum& s) {
    out << "detuning_rad_per_s,transmission\n" << std::setprecision(17);
    for (std::size_t i = 0; i < s.detunings.size(); ++i) out << s.detunings[i] << ',' << s.transmission[i] << '\n';
}

inline void write_spectrum_csv(const std::filesystem::path& path, const atomic::EitSpectrum& s) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("spectrum csv: cannot write " + path.string());
    write_spectrum_csv(out, s);
}

}  // namespace rydberg::io
