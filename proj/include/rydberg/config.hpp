#pragma once

// Experiment configuration: versioned JSON with strict key checking. Every
// parse error names the offending key by its dotted path.

#include "rydberg/atomic.hpp"
#include "rydberg/channel.hpp"
#include "rydberg/codec.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/ofdm.hpp"
#include "rydberg/random.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rydberg::config {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// ---------------------------------------------------------------------------
// Strict reader
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_path(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
}

/// Object view that rejects unknown keys and reports typed lookups by path.
class Obj {
public:
    Obj(const json& j, std::string path, std::initializer_list<const char*> allowed) : j_(j), path_(std::move(path)) {
        if (!j.is_object()) throw ConfigError("config: '" + (path_.empty() ? "<root>" : path_) + "' must be an object");
        for (const auto& [key, _] : j.items()) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw ConfigError("config: unknown key '" + join_path(path_, key) + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& raw(const char* key) const { return j_.at(key); }
    std::string path(const char* key) const { return join_path(path_, key); }

    template <class T>
    void get(const char* key, T& out) const {
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        try {
            if constexpr (std::is_same_v<T, double>) {
                if (!v.is_number()) throw std::invalid_argument("expected a number");
            } else if constexpr (std::is_same_v<T, bool>) {
                if (!v.is_boolean()) throw std::invalid_argument("expected a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!v.is_number_integer()) throw std::invalid_argument("expected an integer");
                if constexpr (std::is_unsigned_v<T>)
                    if (v.is_number_integer() && !v.is_number_unsigned()) throw std::invalid_argument("expected a nonnegative integer");
            } else if constexpr (std::is_same_v<T, std::string>) {
                if (!v.is_string()) throw std::invalid_argument("expected a string");
            }
            out = v.get<T>();
        } catch (const std::exception& e) {
            throw ConfigError("config: key '" + path(key) + "': " + e.what());
        }
    }

    template <class T>
    void require(const char* key, T& out) const {
        if (!j_.contains(key)) throw ConfigError("config: missing required key '" + path(key) + "'");
        get(key, out);
    }

    template <class E>
    void get_enum(const char* key, E& out, std::initializer_list<std::pair<const char*, E>> names) const {
        if (!j_.contains(key)) return;
        const json& v = j_.at(key);
        if (v.is_string())
            for (const auto& [name, value] : names)
                if (v.get<std::string>() == name) {
                    out = value;
                    return;
                }
        std::string choices;
        for (const auto& [name, _] : names) choices += (choices.empty() ? "" : ", ") + std::string(name);
        throw ConfigError("config: key '" + path(key) + "' must be one of: " + choices);
    }

private:
    const json& j_;
    std::string path_;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Enum names
// ---------------------------------------------------------------------------

inline const char* to_string(ofdm::PilotKind k) { return k == ofdm::PilotKind::Comb ? "comb" : "block"; }
inline const char* to_string(ofdm::SampleRate r) { return r == ofdm::SampleRate::Rate48k ? "48k" : "384k"; }
inline const char* to_string(ofdm::BiasMode m) { return m == ofdm::BiasMode::PeakSafe ? "peak_safe" : "fixed_sigma"; }
inline const char* to_string(ofdm::ClipReference c) {
    return c == ofdm::ClipReference::InputPower ? "input_power" : "papr_cap";
}
inline const char* to_string(atomic::ReadoutMode m) {
    return m == atomic::ReadoutMode::IdealEnvelope ? "ideal_envelope" : "eit_nonlinear";
}

// ---------------------------------------------------------------------------
// OFDM
// ---------------------------------------------------------------------------

inline json to_json(const ofdm::OfdmConfig& c) {
    return {{"n_subcarriers", c.n_subcarriers},
            {"oversampling", c.oversampling},
            {"qam_order", c.qam_order},
            {"pilot", to_string(c.pilot.kind)},
            {"pilot_interval", c.pilot.interval},
            {"clip_threshold_db", c.clip_threshold_db ? json(*c.clip_threshold_db) : json(nullptr)},
            {"clip_reference", to_string(c.clip_reference)},
            {"dc_bias", {{"mode", to_string(c.dc_bias.mode)}, {"sigmas", c.dc_bias.sigmas}}},
            {"sample_rate", to_string(c.sample_rate_label)},
            {"carrier_hz", c.carrier_hz}};
}

inline ofdm::OfdmConfig ofdm_from_json(const json& j, const std::string& path = "ofdm") {
    detail::Obj o(j, path,
                  {"n_subcarriers", "oversampling", "qam_order", "pilot", "pilot_interval", "clip_threshold_db",
                   "clip_reference", "dc_bias", "sample_rate", "carrier_hz"});
    ofdm::OfdmConfig c;
    o.get("n_subcarriers", c.n_subcarriers);
    o.get("oversampling", c.oversampling);
    o.get("qam_order", c.qam_order);
    o.get_enum("pilot", c.pilot.kind, {{"comb", ofdm::PilotKind::Comb}, {"block", ofdm::PilotKind::Block}});
    o.get("pilot_interval", c.pilot.interval);
    if (o.has("clip_threshold_db")) {
        if (o.raw("clip_threshold_db").is_null()) {
            c.clip_threshold_db.reset();
        } else {
            double v = 0;
            o.get("clip_threshold_db", v);
            c.clip_threshold_db = v;
        }
    }
    o.get_enum("clip_reference", c.clip_reference,
               {{"input_power", ofdm::ClipReference::InputPower}, {"papr_cap", ofdm::ClipReference::PaprCap}});
    if (o.has("dc_bias")) {
        detail::Obj b(o.raw("dc_bias"), o.path("dc_bias"), {"mode", "sigmas"});
        b.get_enum("mode", c.dc_bias.mode,
                   {{"peak_safe", ofdm::BiasMode::PeakSafe}, {"fixed_sigma", ofdm::BiasMode::FixedSigma}});
        b.get("sigmas", c.dc_bias.sigmas);
    }
    o.get_enum("sample_rate", c.sample_rate_label,
               {{"48k", ofdm::SampleRate::Rate48k}, {"384k", ofdm::SampleRate::Rate384k}});
    o.get("carrier_hz", c.carrier_hz);
    try {
        c.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("config: ") + path + ": " + e.what());
    }
    return c;
}

// ---------------------------------------------------------------------------
// Atomic
// ---------------------------------------------------------------------------

inline json to_json(const atomic::AtomicLevelScheme& s) {
    return {{"ground_label", s.ground_label},
            {"intermediate_label", s.intermediate_label},
            {"rydberg1_label", s.rydberg1_label},
            {"rydberg2_label", s.rydberg2_label},
            {"n_rydberg1", s.n_rydberg1},
            {"probe_wavelength_nm", s.probe_wavelength_nm},
            {"coupling_wavelength_nm", s.coupling_wavelength_nm},
            {"dipole_moment", s.dipole_moment},
            {"gamma_intermediate", s.gamma_intermediate},
            {"gamma_rydberg", s.gamma_rydberg}};
}

inline atomic::AtomicLevelScheme scheme_from_json(const json& j, const std::string& path) {
    detail::Obj o(j, path,
                  {"ground_label", "intermediate_label", "rydberg1_label", "rydberg2_label", "n_rydberg1",
                   "probe_wavelength_nm", "coupling_wavelength_nm", "dipole_moment", "gamma_intermediate",
                   "gamma_rydberg"});
    atomic::AtomicLevelScheme s;
    o.get("ground_label", s.ground_label);
    o.get("intermediate_label", s.intermediate_label);
    o.get("rydberg1_label", s.rydberg1_label);
    o.get("rydberg2_label", s.rydberg2_label);
    o.get("n_rydberg1", s.n_rydberg1);
    o.get("probe_wavelength_nm", s.probe_wavelength_nm);
    o.get("coupling_wavelength_nm", s.coupling_wavelength_nm);
    o.get("dipole_moment", s.dipole_moment);
    o.get("gamma_intermediate", s.gamma_intermediate);
    o.get("gamma_rydberg", s.gamma_rydberg);
    return s;
}

inline json to_json(const atomic::OperatingPoint& op) {
    return {{"probe_rabi", op.probe_rabi},
            {"coupling_rabi", op.coupling_rabi},
            {"coupling_detuning", op.coupling_detuning},
            {"rf_detuning", op.rf_detuning},
            {"readout_mode", to_string(op.readout_mode)},
            {"envelope_gain", op.envelope_gain},
            {"optical_depth", op.optical_depth}};
}

inline atomic::OperatingPoint operating_point_from_json(const json& j, const std::string& path) {
    detail::Obj o(j, path,
                  {"probe_rabi", "coupling_rabi", "coupling_detuning", "rf_detuning", "readout_mode", "envelope_gain",
                   "optical_depth"});
    atomic::OperatingPoint op;
    o.get("probe_rabi", op.probe_rabi);
    o.get("coupling_rabi", op.coupling_rabi);
    o.get("coupling_detuning", op.coupling_detuning);
    o.get("rf_detuning", op.rf_detuning);
    o.get_enum("readout_mode", op.readout_mode,
               {{"ideal_envelope", atomic::ReadoutMode::IdealEnvelope},
                {"eit_nonlinear", atomic::ReadoutMode::EitNonlinear}});
    o.get("envelope_gain", op.envelope_gain);
    o.get("optical_depth", op.optical_depth);
    return op;
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// Default time-varying walk, resolved against the OFDM frame length at
/// run time (see ChannelModel::time_varying).
struct TimeVaryingGain {
    double spread = 0.3;
    friend bool operator==(const TimeVaryingGain&, const TimeVaryingGain&) = default;
};

using GainSpec = std::variant<channel::StaticGain, channel::RandomWalkGain, channel::SinusoidGain, TimeVaryingGain>;

/// Channel parameters as configured. Noise is either an absolute density or
/// a target effective SNR that is converted to a density per run.
struct ChannelSpec {
    atomic::OperatingPoint readout{};
    atomic::AtomicLevelScheme scheme = atomic::AtomicLevelScheme::cesium();
    double noise_density = 0.0;
    std::optional<double> snr_db;
    GainSpec gain = channel::StaticGain{};
    double rf_detuning = 0.0;
    std::uint64_t seed = 0;
    friend bool operator==(const ChannelSpec&, const ChannelSpec&) = default;
};

inline json to_json(const GainSpec& g) {
    if (auto* s = std::get_if<channel::StaticGain>(&g)) return {{"type", "static"}, {"gain", s->gain}};
    if (auto* w = std::get_if<channel::RandomWalkGain>(&g))
        return {{"type", "random_walk"}, {"step_sigma", w->step_sigma}, {"reversion", w->reversion}, {"seed", w->seed}};
    if (auto* s = std::get_if<channel::SinusoidGain>(&g))
        return {{"type", "sinusoid"}, {"depth", s->depth}, {"period_samples", s->period_samples}};
    return {{"type", "time_varying"}, {"spread", std::get<TimeVaryingGain>(g).spread}};
}

inline GainSpec gain_from_json(const json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
        throw ConfigError("config: key '" + path + ".type' missing or not a string");
    const auto type = j["type"].get<std::string>();
    if (type == "static") {
        detail::Obj o(j, path, {"type", "gain"});
        channel::StaticGain g;
        o.get("gain", g.gain);
        return g;
    }
    if (type == "random_walk") {
        detail::Obj o(j, path, {"type", "step_sigma", "reversion", "seed"});
        channel::RandomWalkGain g;
        o.get("step_sigma", g.step_sigma);
        o.get("reversion", g.reversion);
        o.get("seed", g.seed);
        return g;
    }
    if (type == "sinusoid") {
        detail::Obj o(j, path, {"type", "depth", "period_samples"});
        channel::SinusoidGain g;
        o.get("depth", g.depth);
        o.get("period_samples", g.period_samples);
        return g;
    }
    if (type == "time_varying") {
        detail::Obj o(j, path, {"type", "spread"});
        TimeVaryingGain g;
        o.get("spread", g.spread);
        return g;
    }
    throw ConfigError("config: key '" + path + ".type' must be one of: static, random_walk, sinusoid, time_varying");
}

inline json to_json(const ChannelSpec& c) {
    return {{"readout", to_json(c.readout)},
            {"scheme", to_json(c.scheme)},
            {"noise_density", c.noise_density},
            {"snr_db", c.snr_db ? json(*c.snr_db) : json(nullptr)},
            {"gain", to_json(c.gain)},
            {"rf_detuning", c.rf_detuning},
            {"seed", c.seed}};
}

inline ChannelSpec channel_from_json(const json& j, const std::string& path = "channel") {
    detail::Obj o(j, path, {"readout", "scheme", "noise_density", "snr_db", "gain", "rf_detuning", "seed"});
    ChannelSpec c;
    if (o.has("readout")) c.readout = operating_point_from_json(o.raw("readout"), o.path("readout"));
    if (o.has("scheme")) c.scheme = scheme_from_json(o.raw("scheme"), o.path("scheme"));
    o.get("noise_density", c.noise_density);
    if (o.has("snr_db") && !o.raw("snr_db").is_null()) {
        double v = 0;
        o.get("snr_db", v);
        c.snr_db = v;
    }
    if (o.has("gain")) c.gain = gain_from_json(o.raw("gain"), o.path("gain"));
    o.get("rf_detuning", c.rf_detuning);
    o.get("seed", c.seed);
    return c;
}

inline constexpr std::size_t kSnrReferenceSymbols = 16;

/// Concrete channel for one OFDM configuration. An snr_db target is met on a
/// reference burst of random frames through the noiseless channel.
inline channel::ChannelModel resolve_channel(const ChannelSpec& spec, const ofdm::OfdmConfig& ofdm) {
    channel::ChannelModel m;
    m.readout = spec.readout;
    m.scheme = spec.scheme;
    m.noise_density = spec.noise_density;
    m.rf_detuning = spec.rf_detuning;
    m.seed = spec.seed;
    if (auto* tv = std::get_if<TimeVaryingGain>(&spec.gain)) {
        auto walk = channel::ChannelModel::time_varying(ofdm, 0.0, spec.seed);
        auto g = std::get<channel::RandomWalkGain>(walk.gain);
        g.step_sigma *= tv->spread / 0.3;
        m.gain = g;
    } else {
        std::visit([&](const auto& g) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(g)>, TimeVaryingGain>) m.gain = g;
        }, spec.gain);
    }
    if (spec.snr_db) {
        std::size_t n_bits = 0;
        for (std::size_t k = 0; k < kSnrReferenceSymbols; ++k)
            n_bits += ofdm::data_bins(ofdm, static_cast<std::int64_t>(k)) *
                      static_cast<std::size_t>(qam::bits_per_symbol(ofdm.qam_order));
        const auto bits = random_bits(n_bits, spec.seed, Stream::PayloadBits);
        const auto grids = ofdm::build_grids(bits, ofdm, 0);
        std::vector<ofdm::TimeFrame> frames;
        for (const auto& g : grids) frames.push_back(ofdm::modulate(g, ofdm));
        m.noise_density = channel::noise_density_for_snr(m, channel::concatenate(frames), ofdm.sample_rate_hz(), *spec.snr_db);
    }
    return m;
}

// ---------------------------------------------------------------------------
// Codecs
// ---------------------------------------------------------------------------

inline json to_json(const codec::CodecDescriptor& d) {
    json j{{"codec_id", d.codec_id}};
    if (d.kind == codec::CodecKind::ExternalProcess) {
        j["kind"] = "external_process";
        j["command"] = d.command;
    } else {
        j["kind"] = "builtin_baseline";
        const auto& p = d.baseline;
        j["baseline"] = {{"width", p.width},       {"height", p.height},
                         {"channels", p.channels}, {"quality", p.quality},
                         {"kept_coefficients", p.kept_coefficients}, {"repetition", p.repetition}};
    }
    return j;
}

inline codec::CodecDescriptor codec_from_json(const json& j, const std::string& path) {
    detail::Obj o(j, path, {"codec_id", "kind", "command", "baseline"});
    codec::CodecDescriptor d;
    o.require("codec_id", d.codec_id);
    o.get_enum("kind", d.kind,
               {{"builtin_baseline", codec::CodecKind::BuiltinBaseline},
                {"external_process", codec::CodecKind::ExternalProcess}});
    if (d.kind == codec::CodecKind::ExternalProcess) {
        if (!o.has("command") || !o.raw("command").is_array() || o.raw("command").empty())
            throw ConfigError("config: key '" + o.path("command") + "' must be a non-empty array of strings");
        for (const auto& a : o.raw("command")) {
            if (!a.is_string()) throw ConfigError("config: key '" + o.path("command") + "' must hold strings");
            d.command.push_back(a.get<std::string>());
        }
    }
    if (o.has("baseline")) {
        detail::Obj b(o.raw("baseline"), o.path("baseline"),
                      {"width", "height", "channels", "quality", "kept_coefficients", "repetition"});
        auto& p = d.baseline;
        b.get("width", p.width);
        b.get("height", p.height);
        b.get("channels", p.channels);
        b.get("quality", p.quality);
        b.get("kept_coefficients", p.kept_coefficients);
        b.get("repetition", p.repetition);
        try {
            p.validate();
        } catch (const ArgumentError& e) {
            throw ConfigError("config: " + o.path("baseline") + ": " + e.what());
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Experiment
// ---------------------------------------------------------------------------

struct SweepAxis {
    std::string name;  // dotted path into the "ofdm" or "channel" section
    std::vector<json> values;
    friend bool operator==(const SweepAxis&, const SweepAxis&) = default;
};

struct SpectrumSpec {
    std::vector<double> rf_rabi = {0.0, atomic::kTwoPi * 5e6};  // rad/s
    double half_span = atomic::kTwoPi * 15e6;                   // rad/s
    std::size_t points = 3001;
    friend bool operator==(const SpectrumSpec&, const SpectrumSpec&) = default;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    ofdm::OfdmConfig ofdm{};
    ChannelSpec channel{};
    std::vector<SweepAxis> sweep;
    std::vector<std::uint64_t> seeds = {1};
    std::size_t n_bits = 100'000;
    std::string output_dir = "out";
    SpectrumSpec spectrum{};
    std::vector<codec::CodecDescriptor> codecs;
    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

inline json to_json(const ExperimentConfig& c) {
    json axes = json::array();
    for (const auto& a : c.sweep) axes.push_back({{"name", a.name}, {"values", a.values}});
    json codecs = json::array();
    for (const auto& d : c.codecs) codecs.push_back(to_json(d));
    return {{"schema_version", c.schema_version},
            {"ofdm", to_json(c.ofdm)},
            {"channel", to_json(c.channel)},
            {"sweep", axes},
            {"seeds", c.seeds},
            {"n_bits", c.n_bits},
            {"output_dir", c.output_dir},
            {"spectrum", {{"rf_rabi", c.spectrum.rf_rabi}, {"half_span", c.spectrum.half_span}, {"points", c.spectrum.points}}},
            {"codecs", codecs}};
}

/// Checks that `name` addresses an existing scalar parameter.
inline json::json_pointer axis_pointer(const std::string& name) {
    if (name.rfind("ofdm.", 0) != 0 && name.rfind("channel.", 0) != 0)
        throw ConfigError("config: sweep axis '" + name + "' must start with 'ofdm.' or 'channel.'");
    std::string ptr;
    std::size_t start = 0;
    while (start <= name.size()) {
        const auto dot = name.find('.', start);
        ptr += "/" + name.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return json::json_pointer(ptr);
}

inline ExperimentConfig experiment_from_json(const json& j) {
    detail::Obj o(j, "", {"schema_version", "ofdm", "channel", "sweep", "seeds", "n_bits", "output_dir", "spectrum", "codecs"});
    ExperimentConfig c;
    o.require("schema_version", c.schema_version);
    if (c.schema_version != kSchemaVersion)
        throw ConfigError("config: key 'schema_version' is " + std::to_string(c.schema_version) + ", this build reads " +
                          std::to_string(kSchemaVersion));
    if (o.has("ofdm")) c.ofdm = ofdm_from_json(o.raw("ofdm"));
    if (o.has("channel")) c.channel = channel_from_json(o.raw("channel"));
    if (o.has("sweep")) {
        const auto& arr = o.raw("sweep");
        if (!arr.is_array()) throw ConfigError("config: key 'sweep' must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "sweep[" + std::to_string(i) + "]";
            detail::Obj a(arr[i], path, {"name", "values"});
            SweepAxis axis;
            a.require("name", axis.name);
            if (!a.has("values") || !a.raw("values").is_array() || a.raw("values").empty())
                throw ConfigError("config: key '" + a.path("values") + "' must be a non-empty array");
            for (const auto& v : a.raw("values")) axis.values.push_back(v);
            c.sweep.push_back(std::move(axis));
        }
    }
    if (o.has("seeds")) {
        c.seeds.clear();
        o.get("seeds", c.seeds);
    }
    if (c.seeds.empty()) throw ConfigError("config: key 'seeds' must list at least one seed");
    o.get("n_bits", c.n_bits);
    o.get("output_dir", c.output_dir);
    if (o.has("spectrum")) {
        detail::Obj s(o.raw("spectrum"), "spectrum", {"rf_rabi", "half_span", "points"});
        s.get("rf_rabi", c.spectrum.rf_rabi);
        s.get("half_span", c.spectrum.half_span);
        s.get("points", c.spectrum.points);
    }
    if (o.has("codecs")) {
        const auto& arr = o.raw("codecs");
        if (!arr.is_array()) throw ConfigError("config: key 'codecs' must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i)
            c.codecs.push_back(codec_from_json(arr[i], "codecs[" + std::to_string(i) + "]"));
    }

    // Axes must address existing parameters of the serialized sections.
    const json full = to_json(c);
    for (const auto& axis : c.sweep) {
        const auto ptr = axis_pointer(axis.name);
        if (!full.contains(ptr) || full.at(ptr).is_object() || full.at(ptr).is_array())
            throw ConfigError("config: sweep axis '" + axis.name + "' does not name a parameter");
    }
    return c;
}

inline ExperimentConfig load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path.string() + " is not valid JSON: " + e.what());
    }
    return experiment_from_json(j);
}

/// One point of the sweep grid: axis values applied to the base sections.
struct SweepPoint {
    std::size_t index = 0;
    json params = json::object();  // axis name -> value
    ofdm::OfdmConfig ofdm{};
    ChannelSpec channel{};
};

/// Cartesian product of the axes in row-major order (last axis fastest).
inline std::vector<SweepPoint> expand_sweep(const ExperimentConfig& c) {
    std::size_t total = 1;
    for (const auto& a : c.sweep) total *= a.values.size();
    std::vector<SweepPoint> points;
    points.reserve(total);
    const json base = {{"ofdm", to_json(c.ofdm)}, {"channel", to_json(c.channel)}};
    for (std::size_t p = 0; p < total; ++p) {
        json doc = base;
        SweepPoint pt;
        pt.index = p;
        std::size_t rem = p;
        for (std::size_t ai = c.sweep.size(); ai-- > 0;) {
            const auto& axis = c.sweep[ai];
            const auto& v = axis.values[rem % axis.values.size()];
            rem /= axis.values.size();
            doc[axis_pointer(axis.name)] = v;
        }
        for (const auto& axis : c.sweep) pt.params[axis.name] = doc.at(axis_pointer(axis.name));
        pt.ofdm = ofdm_from_json(doc.at("ofdm"));
        pt.channel = channel_from_json(doc.at("channel"));
        points.push_back(std::move(pt));
    }
    return points;
}

}  // namespace rydberg::config
