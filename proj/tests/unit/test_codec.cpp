#include "rydberg/codec.hpp"
#include "rydberg/image.hpp"
#include "rydberg/link.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace rydberg;
using image::Image;
namespace fs = std::filesystem;

namespace {

const fs::path kData = RYDBERG_DATA_DIR;

Image camera() { return image::read_pnm(kData / "images" / "camera.pgm"); }

Image noise_image(int w, int h, int c, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Image img(w, h, c);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

// Direct two-pass SSIM on a gray image, for cross-checking.
double ssim_reference(const Image& a, const Image& b) {
    const double c1 = 6.5025, c2 = 58.5225;
    double total = 0;
    int count = 0;
    for (int oy = 0; oy + 8 <= a.height; ++oy)
        for (int ox = 0; ox + 8 <= a.width; ++ox) {
            double mx = 0, my = 0;
            for (int j = 0; j < 8; ++j)
                for (int i = 0; i < 8; ++i) mx += a.at(ox + i, oy + j), my += b.at(ox + i, oy + j);
            mx /= 64, my /= 64;
            double vx = 0, vy = 0, cov = 0;
            for (int j = 0; j < 8; ++j)
                for (int i = 0; i < 8; ++i) {
                    const double u = a.at(ox + i, oy + j) - mx, v = b.at(ox + i, oy + j) - my;
                    vx += u * u, vy += v * v, cov += u * v;
                }
            vx /= 64, vy /= 64, cov /= 64;
            total += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / count;
}

}  // namespace

TEST(Bitstream, RoundTripAndLayout) {
    const Bits bits = {1, 0, 1, 1, 0, 0, 0, 1, 1, 1};
    std::stringstream ss;
    codec::write_bitstream(ss, bits);
    const std::string raw = ss.str();
    ASSERT_EQ(raw.size(), 8U + 2U);
    EXPECT_EQ(static_cast<unsigned char>(raw[0]), 10U);
    for (int i = 1; i < 8; ++i) EXPECT_EQ(raw[i], 0);
    EXPECT_EQ(static_cast<unsigned char>(raw[8]), 0xB1U);
    EXPECT_EQ(static_cast<unsigned char>(raw[9]), 0xC0U);
    EXPECT_EQ(codec::read_bitstream(ss), bits);

    for (std::size_t n : {0U, 1U, 8U, 9U, 1000U}) {
        const auto r = random_bits(n, n);
        std::stringstream s2;
        codec::write_bitstream(s2, r);
        EXPECT_EQ(codec::read_bitstream(s2), r);
    }
}

TEST(Bitstream, TruncationIsCodecError) {
    std::stringstream ss;
    codec::write_bitstream(ss, random_bits(100, 1));
    const std::string raw = ss.str();
    std::stringstream short_header(raw.substr(0, 5));
    EXPECT_THROW(codec::read_bitstream(short_header), CodecError);
    std::stringstream short_body(raw.substr(0, raw.size() - 1));
    EXPECT_THROW(codec::read_bitstream(short_body), CodecError);
}

TEST(Image, PnmRoundTrip) {
    for (int c : {1, 3}) {
        const auto img = noise_image(13, 7, c, 5);
        std::stringstream ss;
        image::write_pnm(ss, img);
        EXPECT_EQ(image::read_pnm(ss), img);
    }
    std::stringstream commented("P5\n# a comment\n2 1\n255\n\x01\x02");
    const auto img = image::read_pnm(commented);
    EXPECT_EQ(img.width, 2);
    EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{1, 2}));
    std::stringstream bad("P2\n1 1\n255\n0");
    EXPECT_THROW(image::read_pnm(bad), ArgumentError);
}

TEST(Metrics, PsnrExamples) {
    const auto a = camera();
    auto b = a;
    for (auto& p : b.pixels) p = p < 255 ? p + 1 : p - 1;
    EXPECT_NEAR(image::psnr(a, b), 10 * std::log10(255.0 * 255.0), 1e-9);
    EXPECT_NEAR(image::psnr(a, b), 48.13, 0.005);
    EXPECT_TRUE(std::isinf(image::psnr(a, a)));
    const auto c = noise_image(256, 256, 1, 3);
    EXPECT_DOUBLE_EQ(image::psnr(a, c), image::psnr(c, a));
    EXPECT_THROW(image::psnr(a, noise_image(255, 256, 1, 1)), ArgumentError);
}

TEST(Metrics, SsimMatchesDirectComputation) {
    const auto a = noise_image(40, 30, 1, 8);
    auto b = a;
    for (std::size_t i = 0; i < b.pixels.size(); i += 3) b.pixels[i] = static_cast<std::uint8_t>(b.pixels[i] / 2);
    EXPECT_NEAR(image::ssim(a, b), ssim_reference(a, b), 1e-9);
    EXPECT_NEAR(image::ssim(a, b), image::ssim(b, a), 1e-12);
    EXPECT_DOUBLE_EQ(image::ssim(a, a), 1.0);
}

TEST(Metrics, SsimOfNegativeImage) {
    const auto a = camera();
    auto neg = a;
    for (auto& p : neg.pixels) p = static_cast<std::uint8_t>(255 - p);
    const double s = image::ssim(a, neg);
    EXPECT_LT(s, 0.1);
    EXPECT_NEAR(s, ssim_reference(a, neg), 1e-9);
    EXPECT_THROW(image::ssim(noise_image(7, 20, 1, 1), noise_image(7, 20, 1, 2)), ArgumentError);
}

TEST(Baseline, CameraQualityAndSize) {
    const codec::BaselineCodec c;
    const auto img = camera();
    const auto bits = c.encode(img);
    EXPECT_EQ(bits.size(), c.bits_per_image());
    EXPECT_EQ(c.bits_per_image() % 3, 0U);
    const auto out = c.decode(bits);
    EXPECT_TRUE(out.same_shape(img));
    EXPECT_GE(image::psnr(img, out), 30.0);
    EXPECT_EQ(c.encode(img), bits);
}

TEST(Baseline, GarbageStillDecodes) {
    const codec::BaselineCodec c;
    auto bits = c.encode(camera());
    for (auto& b : bits) b ^= 1U;
    const auto out = c.decode(bits);
    EXPECT_EQ(out.width, 256);
    EXPECT_EQ(out.pixels.size(), 256U * 256U);
}

TEST(Baseline, GracefulAtLowBer) {
    const codec::BaselineCodec c;
    const auto img = camera();
    const auto bits = c.encode(img);
    const double clean = image::psnr(img, c.decode(bits));
    double mean = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) mean += image::psnr(img, c.decode(link::flip_bits(bits, 1e-4, seed))) / 20.0;
    EXPECT_GT(mean, clean - 0.5);
}

TEST(Baseline, RgbRoundTrip) {
    codec::BaselineParams p;
    p.channels = 3;
    const codec::BaselineCodec c(p);
    const auto img = image::read_pnm(kData / "images" / "astronaut.ppm");
    EXPECT_GE(image::psnr(img, c.decode(c.encode(img))), 25.0);
}

TEST(Baseline, Errors) {
    const codec::BaselineCodec c;
    EXPECT_THROW(c.decode(Bits(c.bits_per_image() - 1)), CodecError);
    EXPECT_THROW(c.encode(noise_image(128, 256, 1, 1)), ArgumentError);
    codec::BaselineParams p;
    p.repetition = 2;
    EXPECT_THROW(codec::BaselineCodec{p}, ArgumentError);
}

TEST(ExternalProcess, MatchesBuiltin) {
    const codec::ExternalProcessCodec ext({RYDBERG_CODEC_EXE});
    const codec::BaselineCodec builtin;
    EXPECT_EQ(ext.id(), builtin.id());
    EXPECT_EQ(ext.bits_per_image(), builtin.bits_per_image());
    const auto img = camera();
    const auto bits = ext.encode(img);
    EXPECT_EQ(bits, builtin.encode(img));
    EXPECT_EQ(ext.decode(bits), builtin.decode(bits));
}

TEST(ExternalProcess, HandshakeChecksId) {
    EXPECT_THROW(codec::ExternalProcessCodec({RYDBERG_CODEC_EXE}, "something-else"), CodecError);
    EXPECT_NO_THROW(codec::ExternalProcessCodec({RYDBERG_CODEC_EXE, "--id", "renamed"}, "renamed"));
}

TEST(ExternalProcess, FailureCarriesDiagnostics) {
    try {
        codec::ExternalProcessCodec({"/bin/sh", "-c", "echo broken codec >&2; exit 7", "sh"});
        FAIL() << "expected CodecError";
    } catch (const CodecError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("exit 7"), std::string::npos) << what;
        EXPECT_NE(what.find("broken codec"), std::string::npos) << what;
    }
    EXPECT_THROW(codec::ExternalProcessCodec({"/bin/sh", "-c", "echo not-json", "sh"}), CodecError);
    EXPECT_THROW(codec::ExternalProcessCodec({"/nonexistent/codec"}), CodecError);
}

TEST(ExternalProcess, DeclaredLengthEnforced) {
    // Declares one bit more than it emits.
    const codec::BaselineCodec builtin;
    const std::string script = "if [ \"$1\" = info ]; then echo '{\"codec_id\":\"liar\",\"bits_per_image\":" +
                               std::to_string(builtin.bits_per_image() + 1) + "}'; else exec " RYDBERG_CODEC_EXE " \"$@\"; fi";
    const codec::ExternalProcessCodec liar({"/bin/sh", "-c", script, "sh"});
    EXPECT_THROW(liar.encode(camera()), FramingError);
}

TEST(Descriptor, MakeCodec) {
    codec::CodecDescriptor d;
    d.codec_id = codec::BaselineCodec::kId;
    EXPECT_EQ(codec::make_codec(d)->id(), codec::BaselineCodec::kId);
    d.kind = codec::CodecKind::ExternalProcess;
    d.command = {RYDBERG_CODEC_EXE};
    EXPECT_EQ(codec::make_codec(d)->bits_per_image(), codec::BaselineCodec{}.bits_per_image());
}
