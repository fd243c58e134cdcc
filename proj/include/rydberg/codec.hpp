#pragma once

// Image codecs behind one interface: the built-in DCT + repetition baseline
// and external codec processes driven through files.
//
// External contract:
//   <cmd...> info                          -> JSON {"codec_id", "bits_per_image"} on stdout
//   <cmd...> encode --in img.pgm --out bits.bin
//   <cmd...> decode --in bits.bin --out img.pgm
// Exit code 0 means success. Bit files carry the bit count as an 8-byte
// little-endian header followed by the bits packed MSB-first.

#include "rydberg/errors.hpp"
#include "rydberg/image.hpp"
#include "rydberg/random.hpp"

#include <nlohmann/json.hpp>

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

namespace rydberg::codec {

using image::Image;

// ---------------------------------------------------------------------------
// Bit stream files
// ---------------------------------------------------------------------------

inline std::vector<std::uint8_t> pack_bits(const Bits& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i] & 1U) bytes[i / 8] |= static_cast<std::uint8_t>(0x80U >> (i % 8));
    return bytes;
}

inline Bits unpack_bits(const std::vector<std::uint8_t>& bytes, std::size_t n_bits) {
    if (bytes.size() * 8 < n_bits) throw CodecError("bitstream: fewer bytes than the declared bit count");
    Bits bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) bits[i] = (bytes[i / 8] >> (7 - i % 8)) & 1U;
    return bits;
}

inline void write_bitstream(std::ostream& out, const Bits& bits) {
    std::uint64_t n = bits.size();
    std::array<char, 8> header{};
    for (int i = 0; i < 8; ++i) header[i] = static_cast<char>((n >> (8 * i)) & 0xFFU);
    out.write(header.data(), 8);
    const auto bytes = pack_bits(bits);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline void write_bitstream(const std::filesystem::path& path, const Bits& bits) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CodecError("bitstream: cannot write " + path.string());
    write_bitstream(out, bits);
}

inline Bits read_bitstream(std::istream& in) {
    std::array<unsigned char, 8> header{};
    in.read(reinterpret_cast<char*>(header.data()), 8);
    if (in.gcount() != 8) throw CodecError("bitstream: truncated length header");
    std::uint64_t n = 0;
    for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(header[i]) << (8 * i);
    if (n > (std::uint64_t{1} << 40)) throw CodecError("bitstream: implausible bit count");
    std::vector<std::uint8_t> bytes((n + 7) / 8);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw CodecError("bitstream: payload shorter than the declared " + std::to_string(n) + " bits");
    return unpack_bits(bytes, n);
}

inline Bits read_bitstream(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CodecError("bitstream: cannot open " + path.string());
    return read_bitstream(in);
}

// ---------------------------------------------------------------------------
// Codec interface
// ---------------------------------------------------------------------------

class Codec {
public:
    virtual ~Codec() = default;
    virtual std::string id() const = 0;
    virtual std::size_t bits_per_image() const = 0;
    /// Throws ArgumentError when the image is outside the codec's limits.
    virtual Bits encode(const Image& img) const = 0;
    /// Throws CodecError on a stream of the wrong length.
    virtual Image decode(const Bits& bits) const = 0;
};

// ---------------------------------------------------------------------------
// Baseline: 8x8 block DCT, JPEG-style uniform quantisation of the first
// `kept_coefficients` zigzag coefficients, fixed-length packing, rate-1/r
// repetition of the whole stream.
// ---------------------------------------------------------------------------

struct BaselineParams {
    int width = 256;
    int height = 256;
    int channels = 1;
    int quality = 75;           // 1..100, IJG scaling of the luminance table
    int kept_coefficients = 21;  // zigzag prefix kept per block
    int repetition = 3;          // odd

    void validate() const {
        if (width <= 0 || height <= 0 || width > 4096 || height > 4096)
            throw ArgumentError("baseline codec: dimensions must be in 1..4096");
        if (channels != 1 && channels != 3) throw ArgumentError("baseline codec: channels must be 1 or 3");
        if (quality < 1 || quality > 100) throw ArgumentError("baseline codec: quality must be in 1..100");
        if (kept_coefficients < 1 || kept_coefficients > 64)
            throw ArgumentError("baseline codec: kept_coefficients must be in 1..64");
        if (repetition < 1 || repetition % 2 == 0) throw ArgumentError("baseline codec: repetition must be odd");
    }
    friend bool operator==(const BaselineParams&, const BaselineParams&) = default;
};

namespace detail {

inline constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

inline constexpr std::array<int, 64> kLumaTable = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,  14, 13, 16, 24,  40,  57,
    69, 56, 14, 17, 22,  29,  51,  87,  80, 62, 18, 22, 37,  56,  68,  109, 103, 77, 24, 35, 55,  64,
    81, 104, 113, 92, 49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};

inline std::array<int, 64> quant_table(int quality) {
    const int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
    std::array<int, 64> q{};
    for (int i = 0; i < 64; ++i) q[i] = std::clamp((kLumaTable[i] * scale + 50) / 100, 1, 255);
    return q;
}

// Orthonormal 8-point DCT-II basis, basis[u][x].
inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const auto basis = [] {
        std::array<std::array<double, 8>, 8> b{};
        for (int u = 0; u < 8; ++u)
            for (int x = 0; x < 8; ++x)
                b[u][x] = (u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0)) *
                          std::cos((2 * x + 1) * u * std::numbers::pi / 16.0);
        return b;
    }();
    return basis;
}

inline std::array<double, 64> dct2(const std::array<double, 64>& block) {
    const auto& b = dct_basis();
    std::array<double, 64> tmp{}, out{};
    for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
            double s = 0;
            for (int x = 0; x < 8; ++x) s += b[u][x] * block[y * 8 + x];
            tmp[y * 8 + u] = s;
        }
    for (int v = 0; v < 8; ++v)
        for (int u = 0; u < 8; ++u) {
            double s = 0;
            for (int y = 0; y < 8; ++y) s += b[v][y] * tmp[y * 8 + u];
            out[v * 8 + u] = s;
        }
    return out;
}

inline std::array<double, 64> idct2(const std::array<double, 64>& coeff) {
    const auto& b = dct_basis();
    std::array<double, 64> tmp{}, out{};
    for (int y = 0; y < 8; ++y)
        for (int u = 0; u < 8; ++u) {
            double s = 0;
            for (int v = 0; v < 8; ++v) s += b[v][y] * coeff[v * 8 + u];
            tmp[y * 8 + u] = s;
        }
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            double s = 0;
            for (int u = 0; u < 8; ++u) s += b[u][x] * tmp[y * 8 + u];
            out[y * 8 + x] = s;
        }
    return out;
}

// Level-shifted 8-bit samples give |coefficient| <= 8 * 128 for the
// orthonormal transform.
inline constexpr double kMaxCoefficient = 1024.0;

inline int field_bits(int step) {
    const int max_q = static_cast<int>(std::ceil(kMaxCoefficient / step));
    int b = 1;
    while ((1 << (b - 1)) - 1 < max_q) ++b;
    return b;
}

}  // namespace detail

class BaselineCodec final : public Codec {
public:
    static constexpr const char* kId = "baseline-dct-rep3";

    explicit BaselineCodec(BaselineParams params = {}) : p_(params) {
        p_.validate();
        q_ = detail::quant_table(p_.quality);
        for (int k = 0; k < p_.kept_coefficients; ++k) {
            widths_[k] = detail::field_bits(q_[detail::kZigzag[k]]);
            block_bits_ += static_cast<std::size_t>(widths_[k]);
        }
    }

    std::string id() const override { return kId; }
    const BaselineParams& params() const { return p_; }

    std::size_t blocks() const {
        return static_cast<std::size_t>((p_.width + 7) / 8) * static_cast<std::size_t>((p_.height + 7) / 8) *
               static_cast<std::size_t>(p_.channels);
    }
    std::size_t source_bits() const { return blocks() * block_bits_; }
    std::size_t bits_per_image() const override { return source_bits() * static_cast<std::size_t>(p_.repetition); }

    Bits encode(const Image& img) const override {
        if (img.width != p_.width || img.height != p_.height || img.channels != p_.channels)
            throw ArgumentError("baseline codec: image is " + shape(img.width, img.height, img.channels) +
                                ", codec expects " + shape(p_.width, p_.height, p_.channels));
        Bits src;
        src.reserve(source_bits());
        for_each_block([&](int c, int bx, int by) {
            std::array<double, 64> block{};
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    const int sx = std::min(bx * 8 + x, p_.width - 1);
                    const int sy = std::min(by * 8 + y, p_.height - 1);
                    block[y * 8 + x] = static_cast<double>(img.at(sx, sy, c)) - 128.0;
                }
            const auto coeff = detail::dct2(block);
            for (int k = 0; k < p_.kept_coefficients; ++k) {
                const int step = q_[detail::kZigzag[k]];
                const int w = widths_[k];
                const int lim = (1 << (w - 1)) - 1;
                const int q = std::clamp(static_cast<int>(std::lround(coeff[detail::kZigzag[k]] / step)), -lim, lim);
                const auto u = static_cast<std::uint32_t>(q) & ((1U << w) - 1U);
                for (int b = w - 1; b >= 0; --b) src.push_back(static_cast<std::uint8_t>((u >> b) & 1U));
            }
        });
        Bits out;
        out.reserve(bits_per_image());
        for (int r = 0; r < p_.repetition; ++r) out.insert(out.end(), src.begin(), src.end());
        return out;
    }

    Image decode(const Bits& bits) const override {
        if (bits.size() != bits_per_image())
            throw CodecError("baseline codec: stream has " + std::to_string(bits.size()) + " bits, expected " +
                             std::to_string(bits_per_image()));
        const std::size_t n = source_bits();
        Bits src(n);
        for (std::size_t i = 0; i < n; ++i) {
            int ones = 0;
            for (int r = 0; r < p_.repetition; ++r) ones += bits[static_cast<std::size_t>(r) * n + i] & 1U;
            src[i] = ones * 2 > p_.repetition ? 1 : 0;
        }
        Image img(p_.width, p_.height, p_.channels);
        std::size_t pos = 0;
        for_each_block([&](int c, int bx, int by) {
            std::array<double, 64> coeff{};
            for (int k = 0; k < p_.kept_coefficients; ++k) {
                const int w = widths_[k];
                std::uint32_t u = 0;
                for (int b = 0; b < w; ++b) u = (u << 1) | src[pos++];
                int q = static_cast<int>(u);
                if (u & (1U << (w - 1))) q -= 1 << w;
                coeff[detail::kZigzag[k]] = static_cast<double>(q) * q_[detail::kZigzag[k]];
            }
            const auto block = detail::idct2(coeff);
            for (int y = 0; y < 8; ++y)
                for (int x = 0; x < 8; ++x) {
                    const int sx = bx * 8 + x, sy = by * 8 + y;
                    if (sx >= p_.width || sy >= p_.height) continue;
                    img.at(sx, sy, c) = static_cast<std::uint8_t>(std::clamp(std::lround(block[y * 8 + x] + 128.0), 0L, 255L));
                }
        });
        return img;
    }

private:
    template <class F>
    void for_each_block(F&& f) const {
        for (int c = 0; c < p_.channels; ++c)
            for (int by = 0; by < (p_.height + 7) / 8; ++by)
                for (int bx = 0; bx < (p_.width + 7) / 8; ++bx) f(c, bx, by);
    }

    static std::string shape(int w, int h, int c) {
        return std::to_string(w) + "x" + std::to_string(h) + "x" + std::to_string(c);
    }

    BaselineParams p_;
    std::array<int, 64> q_{};
    std::array<int, 64> widths_{};
    std::size_t block_bits_ = 0;
};

// ---------------------------------------------------------------------------
// External process codecs
// ---------------------------------------------------------------------------

namespace detail {

class TempDir {
public:
    TempDir() {
        auto templ = (std::filesystem::temp_directory_path() / "rydberg-codec-XXXXXX").string();
        if (!::mkdtemp(templ.data())) throw CodecError("codec: cannot create a temporary directory");
        path_ = templ;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct ProcessResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run argv with stdout/stderr captured to files in `dir`.
inline ProcessResult run_process(const std::vector<std::string>& argv, const std::filesystem::path& dir) {
    if (argv.empty()) throw CodecError("codec: empty command");
    const auto out_path = dir / "stdout.txt";
    const auto err_path = dir / "stderr.txt";
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, STDIN_FILENO, "/dev/null", O_RDONLY, 0);
    posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, out_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, err_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = 0;
    const int rc = ::posix_spawnp(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw CodecError("codec: cannot start '" + argv[0] + "': " + std::strerror(rc));
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0) {
        if (errno != EINTR) throw CodecError("codec: waitpid failed for '" + argv[0] + "'");
    }
    ProcessResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

inline std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& a : v) s += (s.empty() ? "" : " ") + a;
    return s;
}

}  // namespace detail

class ExternalProcessCodec final : public Codec {
public:
    /// Runs the `info` handshake; `expected_id` (if non-empty) must match.
    explicit ExternalProcessCodec(std::vector<std::string> command, std::string expected_id = {})
        : command_(std::move(command)) {
        detail::TempDir dir;
        auto argv = command_;
        argv.emplace_back("info");
        const auto r = detail::run_process(argv, dir.path());
        check(r, "info");
        nlohmann::json info;
        try {
            info = nlohmann::json::parse(r.out);
            id_ = info.at("codec_id").get<std::string>();
            const auto bits = info.at("bits_per_image").get<std::int64_t>();
            if (bits <= 0) throw CodecError("non-positive bits_per_image");
            bits_ = static_cast<std::size_t>(bits);
        } catch (const std::exception& e) {
            throw CodecError("codec handshake: '" + detail::join(command_) + " info' returned invalid JSON (" +
                             e.what() + ")");
        }
        if (!expected_id.empty() && expected_id != id_)
            throw CodecError("codec handshake: expected codec_id '" + expected_id + "', process reports '" + id_ + "'");
    }

    std::string id() const override { return id_; }
    std::size_t bits_per_image() const override { return bits_; }
    const std::vector<std::string>& command() const { return command_; }

    Bits encode(const Image& img) const override {
        detail::TempDir dir;
        const auto in = dir.path() / (img.channels == 1 ? "in.pgm" : "in.ppm");
        const auto out = dir.path() / "bits.bin";
        image::write_pnm(in, img);
        auto argv = command_;
        argv.insert(argv.end(), {"encode", "--in", in.string(), "--out", out.string()});
        check(detail::run_process(argv, dir.path()), "encode");
        auto bits = read_bitstream(out);
        if (bits.size() != bits_)
            throw FramingError("codec '" + id_ + "' emitted " + std::to_string(bits.size()) + " bits, declared " +
                               std::to_string(bits_));
        return bits;
    }

    Image decode(const Bits& bits) const override {
        detail::TempDir dir;
        const auto in = dir.path() / "bits.bin";
        const auto out = dir.path() / "out.pnm";
        write_bitstream(in, bits);
        auto argv = command_;
        argv.insert(argv.end(), {"decode", "--in", in.string(), "--out", out.string()});
        check(detail::run_process(argv, dir.path()), "decode");
        try {
            return image::read_pnm(out);
        } catch (const ArgumentError& e) {
            throw CodecError("codec '" + id_ + "' decode produced an unreadable image: " + e.what());
        }
    }

private:
    void check(const detail::ProcessResult& r, const std::string& stage) const {
        if (r.exit_code == 0) return;
        throw CodecError("codec " + stage + " failed (exit " + std::to_string(r.exit_code) + ") running '" +
                         detail::join(command_) + "': " + r.err);
    }

    std::vector<std::string> command_;
    std::string id_;
    std::size_t bits_ = 0;
};

// ---------------------------------------------------------------------------
// Descriptors
// ---------------------------------------------------------------------------

enum class CodecKind { ExternalProcess, BuiltinBaseline };

struct CodecDescriptor {
    std::string codec_id;
    CodecKind kind = CodecKind::BuiltinBaseline;
    std::vector<std::string> command;  // ExternalProcess only
    BaselineParams baseline{};         // BuiltinBaseline only
    friend bool operator==(const CodecDescriptor&, const CodecDescriptor&) = default;
};

/// Instantiate a codec; external codecs are handshaken here.
inline std::unique_ptr<Codec> make_codec(const CodecDescriptor& d) {
    if (d.kind == CodecKind::BuiltinBaseline) return std::make_unique<BaselineCodec>(d.baseline);
    return std::make_unique<ExternalProcessCodec>(d.command, d.codec_id);
}

}  // namespace rydberg::codec
