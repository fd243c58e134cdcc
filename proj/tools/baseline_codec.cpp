// The built-in baseline codec behind the external-process codec contract:
//   baseline_codec [shape options] info
//   baseline_codec [shape options] encode --in img.pgm --out bits.bin
//   baseline_codec [shape options] decode --in bits.bin --out img.pgm

#include "rydberg/codec.hpp"
#include "rydberg/image.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <iostream>

using namespace rydberg;

int main(int argc, char** argv) {
    CLI::App app{"DCT + repetition baseline codec"};
    codec::BaselineParams p;
    std::string id = codec::BaselineCodec::kId;
    app.add_option("--width", p.width);
    app.add_option("--height", p.height);
    app.add_option("--channels", p.channels);
    app.add_option("--quality", p.quality);
    app.add_option("--kept", p.kept_coefficients);
    app.add_option("--repetition", p.repetition);
    app.add_option("--id", id, "codec_id reported by info");
    app.require_subcommand(1);

    std::string in, out;
    auto* info = app.add_subcommand("info", "print {codec_id, bits_per_image}");
    auto* encode = app.add_subcommand("encode", "image -> bit stream");
    auto* decode = app.add_subcommand("decode", "bit stream -> image");
    for (auto* s : {encode, decode}) {
        s->add_option("--in", in)->required();
        s->add_option("--out", out)->required();
    }
    CLI11_PARSE(app, argc, argv);

    try {
        const codec::BaselineCodec c(p);
        if (*info) {
            std::cout << nlohmann::json{{"codec_id", id}, {"bits_per_image", c.bits_per_image()}}.dump() << '\n';
        } else if (*encode) {
            codec::write_bitstream(std::filesystem::path(out), c.encode(image::read_pnm(std::filesystem::path(in))));
        } else if (*decode) {
            image::write_pnm(std::filesystem::path(out), c.decode(codec::read_bitstream(std::filesystem::path(in))));
        }
    } catch (const std::exception& e) {
        std::cerr << "baseline_codec: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
