#pragma once

// 8-bit PGM (P5) / PPM (P6) rasters and the PSNR / SSIM quality metrics.

#include "rydberg/errors.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace rydberg::image {

struct Image {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 = gray, 3 = RGB
    std::vector<std::uint8_t> pixels;  // row-major, channel-interleaved

    Image() = default;
    Image(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

    std::uint8_t& at(int x, int y, int c = 0) {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    std::uint8_t at(int x, int y, int c = 0) const {
        return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }
    bool same_shape(const Image& o) const { return width == o.width && height == o.height && channels == o.channels; }
    friend bool operator==(const Image&, const Image&) = default;
};

namespace detail {

inline int read_header_int(std::istream& in) {
    int c = in.peek();
    while (c != EOF) {
        if (c == '#') {
            std::string comment;
            std::getline(in, comment);
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
        c = in.peek();
    }
    int value = -1;
    if (!(in >> value)) throw ArgumentError("pnm: malformed header");
    return value;
}

}  // namespace detail

inline Image read_pnm(std::istream& in) {
    std::string magic(2, '\0');
    in.read(magic.data(), 2);
    if (magic != "P5" && magic != "P6") throw ArgumentError("pnm: only binary P5/P6 images are supported");
    const int channels = magic == "P5" ? 1 : 3;
    const int w = detail::read_header_int(in);
    const int h = detail::read_header_int(in);
    const int maxval = detail::read_header_int(in);
    if (w <= 0 || h <= 0) throw ArgumentError("pnm: non-positive dimensions");
    if (maxval != 255) throw ArgumentError("pnm: only 8-bit images (maxval 255) are supported");
    in.get();  // single whitespace after maxval
    Image img(w, h, channels);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.pixels.size())) throw ArgumentError("pnm: truncated pixel data");
    return img;
}

inline Image read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("pnm: cannot open " + path.string());
    return read_pnm(in);
}

inline void write_pnm(std::ostream& out, const Image& img) {
    if (img.channels != 1 && img.channels != 3) throw ArgumentError("pnm: images must have 1 or 3 channels");
    out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pnm(const std::filesystem::path& path, const Image& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("pnm: cannot write " + path.string());
    write_pnm(out, img);
}

/// Luma (BT.601 weights) as doubles; grayscale images pass through.
inline std::vector<double> luma(const Image& img) {
    std::vector<double> y(static_cast<std::size_t>(img.width) * img.height);
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (img.channels == 1) {
            y[i] = img.pixels[i];
        } else {
            const auto* p = &img.pixels[i * 3];
            y[i] = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        }
    }
    return y;
}

inline constexpr double kPeak = 255.0;

/// 10 log10(peak^2 / MSE) over all channels; +inf for identical images.
inline double psnr(const Image& a, const Image& b) {
    if (!a.same_shape(b)) throw ArgumentError("psnr: image shapes differ");
    double sse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        sse += d * d;
    }
    if (sse == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = sse / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(kPeak * kPeak / mse);
}

inline constexpr int kSsimWindow = 8;

/// Mean SSIM over all 8x8 uniform windows (stride 1) of the luma planes,
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2, population statistics.
inline double ssim(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height) throw ArgumentError("ssim: image sizes differ");
    if (a.width < kSsimWindow || a.height < kSsimWindow) throw ArgumentError("ssim: image smaller than the 8x8 window");
    const auto x = luma(a);
    const auto y = luma(b);
    const int w = a.width, h = a.height;
    const double c1 = (0.01 * kPeak) * (0.01 * kPeak);
    const double c2 = (0.03 * kPeak) * (0.03 * kPeak);
    const double n = kSsimWindow * kSsimWindow;

    double total = 0.0;
    std::size_t windows = 0;
    for (int oy = 0; oy + kSsimWindow <= h; ++oy) {
        for (int ox = 0; ox + kSsimWindow <= w; ++ox) {
            double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
            for (int j = 0; j < kSsimWindow; ++j) {
                const std::size_t row = static_cast<std::size_t>(oy + j) * w + ox;
                for (int i = 0; i < kSsimWindow; ++i) {
                    const double u = x[row + i], v = y[row + i];
                    sx += u;
                    sy += v;
                    sxx += u * u;
                    syy += v * v;
                    sxy += u * v;
                }
            }
            const double mx = sx / n, my = sy / n;
            const double vx = sxx / n - mx * mx;
            const double vy = syy / n - my * my;
            const double cov = sxy / n - mx * my;
            total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++windows;
        }
    }
    return total / static_cast<double>(windows);
}

}  // namespace rydberg::image
