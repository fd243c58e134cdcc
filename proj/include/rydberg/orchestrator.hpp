#pragma once

// Probe -> select -> transmit: BER-indexed codec mapping table and the
// end-to-end image link.

#include "rydberg/channel.hpp"
#include "rydberg/codec.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/image.hpp"
#include "rydberg/link.hpp"
#include "rydberg/ofdm.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

namespace rydberg::link {

struct MappingEntry {
    double ber_upper_bound = 1.0;
    std::string codec_id;
    friend bool operator==(const MappingEntry&, const MappingEntry&) = default;
};

struct CodecMappingTable {
    std::vector<MappingEntry> entries;
    nlohmann::json metadata = nlohmann::json::object();

    /// Bounds in (0, 1], strictly increasing, ending at 1; ids unique and
    /// non-empty. Throws ConfigError.
    void validate() const {
        if (entries.empty()) throw ConfigError("mapping table: no entries");
        std::set<std::string> ids;
        double prev = 0.0;
        for (std::size_t i = 0; i < entries.size(); ++i) {
            const auto& e = entries[i];
            const std::string where = "mapping table entry " + std::to_string(i) + ": ";
            if (!(e.ber_upper_bound > 0.0 && e.ber_upper_bound <= 1.0))
                throw ConfigError(where + "ber_upper_bound must be in (0, 1]");
            if (i > 0 && !(e.ber_upper_bound > prev)) throw ConfigError(where + "ber_upper_bound not strictly increasing");
            if (e.codec_id.empty()) throw ConfigError(where + "empty codec_id");
            if (!ids.insert(e.codec_id).second) throw ConfigError(where + "duplicate codec_id '" + e.codec_id + "'");
            prev = e.ber_upper_bound;
        }
        if (entries.back().ber_upper_bound != 1.0) throw ConfigError("mapping table: last ber_upper_bound must be 1.0");
    }

    /// Accepts the bare array form or {"entries": [...], "metadata": {...}}.
    static CodecMappingTable from_json(const nlohmann::json& j) {
        CodecMappingTable t;
        const nlohmann::json* arr = &j;
        if (j.is_object()) {
            for (const auto& [key, _] : j.items())
                if (key != "entries" && key != "metadata") throw ConfigError("mapping table: unknown key '" + key + "'");
            if (!j.contains("entries")) throw ConfigError("mapping table: missing key 'entries'");
            arr = &j.at("entries");
            if (j.contains("metadata")) t.metadata = j.at("metadata");
        }
        if (!arr->is_array()) throw ConfigError("mapping table: expected a JSON array of {ber_upper_bound, codec_id}");
        for (std::size_t i = 0; i < arr->size(); ++i) {
            const auto& e = (*arr)[i];
            const std::string where = "mapping table entry " + std::to_string(i) + ": ";
            if (!e.is_object()) throw ConfigError(where + "expected an object");
            for (const auto& [key, _] : e.items())
                if (key != "ber_upper_bound" && key != "codec_id") throw ConfigError(where + "unknown key '" + key + "'");
            if (!e.contains("ber_upper_bound") || !e["ber_upper_bound"].is_number())
                throw ConfigError(where + "key 'ber_upper_bound' missing or not a number");
            if (!e.contains("codec_id") || !e["codec_id"].is_string())
                throw ConfigError(where + "key 'codec_id' missing or not a string");
            t.entries.push_back({e["ber_upper_bound"].get<double>(), e["codec_id"].get<std::string>()});
        }
        t.validate();
        return t;
    }

    nlohmann::json to_json() const {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& e : entries) arr.push_back({{"ber_upper_bound", e.ber_upper_bound}, {"codec_id", e.codec_id}});
        if (metadata.empty()) return arr;
        return {{"entries", arr}, {"metadata", metadata}};
    }

    static CodecMappingTable load(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("mapping table: cannot open " + path.string());
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ConfigError("mapping table: " + path.string() + " is not valid JSON: " + e.what());
        }
        return from_json(j);
    }
};

/// First entry whose bound is >= ber (inclusive upper bounds).
inline const std::string& select_codec(double ber, const CodecMappingTable& table) {
    if (table.entries.empty()) throw ConfigError("select_codec: empty mapping table");
    if (!(ber >= 0.0 && ber <= 1.0)) throw ArgumentError("select_codec: ber outside [0, 1]");
    for (const auto& e : table.entries)
        if (ber <= e.ber_upper_bound) return e.codec_id;
    throw ConfigError("select_codec: mapping table does not cover ber = " + std::to_string(ber));
}

struct ImageMetrics {
    double psnr_db = 0.0;  // +inf when the reconstruction is exact
    double ssim = 0.0;
    std::uint64_t bits_sent = 0;  // codec payload bits
    double measured_ber = 0.0;
};

inline nlohmann::json to_json(const ImageMetrics& m) {
    nlohmann::json j;
    j["psnr_db"] = std::isinf(m.psnr_db) ? nlohmann::json("inf") : nlohmann::json(m.psnr_db);
    j["ssim"] = m.ssim;
    j["bits_sent"] = m.bits_sent;
    j["measured_ber"] = m.measured_ber;
    return j;
}

struct ImageLinkResult {
    image::Image reconstructed;
    ImageMetrics metrics;
    std::size_t padding_bits = 0;
    std::size_t symbols = 0;
};

/// encode -> OFDM -> channel -> receive -> decode -> metrics.
inline ImageLinkResult run_image_link(const image::Image& img, const codec::Codec& codec,
                                      const ofdm::OfdmConfig& config, const channel::ChannelModel& model,
                                      std::uint64_t seed) {
    const auto bits = codec.encode(img);
    if (bits.size() != codec.bits_per_image())
        throw FramingError("run_image_link: codec '" + codec.id() + "' emitted " + std::to_string(bits.size()) +
                           " bits, declared " + std::to_string(codec.bits_per_image()));
    const auto chain = transmit_bits(bits, config, seeded_channel(model, seed), seed);
    if (chain.received.size() != bits.size()) throw FramingError("run_image_link: receiver returned a short stream");

    ImageLinkResult r;
    r.reconstructed = codec.decode(chain.received);
    if (!r.reconstructed.same_shape(img)) throw CodecError("run_image_link: decoded image has the wrong shape");
    r.padding_bits = chain.padding_bits;
    r.symbols = chain.symbols;
    r.metrics.psnr_db = image::psnr(img, r.reconstructed);
    r.metrics.ssim = image::ssim(img, r.reconstructed);
    r.metrics.bits_sent = bits.size();
    r.metrics.measured_ber = chain.report.ber;
    return r;
}

}  // namespace rydberg::link
