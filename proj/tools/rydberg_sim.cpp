// rydberg-sim: spectrum dumps, BER sweeps, probes and image link sessions.
//
// Exit codes: 0 success, 2 configuration error, 3 environment/codec error,
// 4 runtime numerical error.

#include "rydberg/rydberg.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace fs = std::filesystem;
using namespace rydberg;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    unsigned jobs = 0;
    std::optional<std::uint64_t> seed;
    std::string image_path;
    std::string table_path;
};

// Error raised inside a named pipeline stage; keeps the original category.
template <class E>
[[noreturn]] void rethrow_with_stage(const std::string& stage, const E& e) {
    throw E(stage + ": " + e.what());
}

template <class F>
auto in_stage(const std::string& stage, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        rethrow_with_stage(stage, e);
    } catch (const CodecError& e) {
        rethrow_with_stage(stage, e);
    } catch (const FramingError& e) {
        rethrow_with_stage(stage, e);
    } catch (const DomainError& e) {
        rethrow_with_stage(stage, e);
    } catch (const ArgumentError& e) {
        rethrow_with_stage(stage, e);
    } catch (const UnsplitSpectrumError&) {
        throw;
    } catch (const NumericalError& e) {
        rethrow_with_stage(stage, e);
    }
}

config::ExperimentConfig load(const Options& opt) {
    auto cfg = opt.config_path.empty() ? config::ExperimentConfig{} : config::load_experiment(opt.config_path);
    if (opt.seed) cfg.seeds = {*opt.seed};
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    spdlog::debug("config: {}", config::to_json(cfg).dump());
    return cfg;
}

fs::path prepare_out(const config::ExperimentConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

unsigned jobs_for(const Options& opt) {
    if (opt.jobs > 0) return opt.jobs;
    return std::max(1U, std::thread::hardware_concurrency());
}

int cmd_spectrum(const Options& opt) {
    const auto cfg = load(opt);
    const auto dir = prepare_out(cfg);
    const auto grid = atomic::uniform_detuning_grid(cfg.spectrum.half_span, cfg.spectrum.points);
    for (std::size_t i = 0; i < cfg.spectrum.rf_rabi.size(); ++i) {
        const double rf = cfg.spectrum.rf_rabi[i];
        const auto spectrum = atomic::eit_spectrum(cfg.channel.scheme, cfg.channel.readout, rf, grid);
        const auto path = dir / fmt::format("spectrum_{}.csv", i);
        io::write_spectrum_csv(path, spectrum);
        const auto peaks = atomic::find_peaks(spectrum);
        std::string sep = "unsplit";
        if (peaks.size() == 2)
            sep = fmt::format("{:.6f} MHz", (peaks[1].position - peaks[0].position) / atomic::kTwoPi / 1e6);
        else if (peaks.size() > 2)
            sep = "malformed";
        fmt::print("{}: rf_rabi = 2pi x {:.6f} MHz, peaks = {}, separation = {}\n", path.string(),
                   rf / atomic::kTwoPi / 1e6, peaks.size(), sep);
    }
    return 0;
}

int cmd_sweep(const Options& opt) {
    const auto cfg = load(opt);
    const auto dir = prepare_out(cfg);
    const auto path = dir / "ber_sweep.jsonl";
    const auto result = sweep::run_sweep(cfg, path, jobs_for(opt), [](std::size_t done, std::size_t total) {
        spdlog::info("sweep: {}/{}", done, total);
    });
    if (result.resumed > 0) spdlog::info("sweep: resumed after {} completed lines", result.resumed);
    fmt::print("{:>5}  {:>4}  {:>12}  {:>12}  {}\n", "point", "runs", "mean_ber", "std_ber", "params");
    for (const auto& s : sweep::summarize(path))
        fmt::print("{:>5}  {:>4}  {:>12.6e}  {:>12.6e}  {}\n", s.point, s.runs, s.mean_ber, s.std_ber, s.params.dump());
    return 0;
}

int cmd_probe(const Options& opt) {
    const auto cfg = load(opt);
    const auto dir = prepare_out(cfg);
    const auto model = config::resolve_channel(cfg.channel, cfg.ofdm);
    std::ofstream out(dir / "probe.jsonl", std::ios::binary);
    for (auto seed : cfg.seeds) {
        const auto r = link::probe(cfg.ofdm, model, cfg.n_bits, seed);
        json j{{"config", {{"ofdm", config::to_json(cfg.ofdm)}, {"channel", config::to_json(cfg.channel)}}},
               {"seed", r.seed},
               {"bits_total", r.bits_total},
               {"bit_errors", r.bit_errors},
               {"ber", r.ber},
               {"degenerate_bins", r.degenerate_bins}};
        out << j.dump() << '\n';
        fmt::print("seed {}: ber = {:.6e} ({} / {})\n", seed, r.ber, r.bit_errors, r.bits_total);
    }
    return 0;
}

int cmd_transmit(const Options& opt) {
    const auto cfg = load(opt);
    const auto dir = prepare_out(cfg);
    if (!fs::exists(opt.image_path)) throw ConfigError("transmit: image " + opt.image_path + " does not exist");
    const auto img = in_stage("read image", [&] { return image::read_pnm(fs::path(opt.image_path)); });
    const auto table = link::CodecMappingTable::load(opt.table_path);
    const std::uint64_t seed = cfg.seeds.front();
    const auto model = config::resolve_channel(cfg.channel, cfg.ofdm);

    const auto probe = in_stage("probe", [&] { return link::probe(cfg.ofdm, model, cfg.n_bits, seed); });
    const std::string codec_id = link::select_codec(probe.ber, table);
    spdlog::info("probe ber {:.6e} selects codec '{}'", probe.ber, codec_id);

    auto it = std::find_if(cfg.codecs.begin(), cfg.codecs.end(),
                           [&](const codec::CodecDescriptor& d) { return d.codec_id == codec_id; });
    codec::CodecDescriptor desc;
    if (it != cfg.codecs.end()) {
        desc = *it;
    } else if (codec_id == codec::BaselineCodec::kId) {
        desc.codec_id = codec_id;
    } else {
        throw CodecError("select: codec '" + codec_id + "' from the mapping table is not registered in the config");
    }
    if (desc.kind == codec::CodecKind::BuiltinBaseline) {
        desc.baseline.width = img.width;
        desc.baseline.height = img.height;
        desc.baseline.channels = img.channels;
    }
    const auto codec = in_stage("codec handshake", [&] { return codec::make_codec(desc); });
    const auto result = in_stage("link", [&] { return link::run_image_link(img, *codec, cfg.ofdm, model, seed); });

    const auto image_out = dir / (img.channels == 1 ? "reconstructed.pgm" : "reconstructed.ppm");
    image::write_pnm(image_out, result.reconstructed);
    json metrics = link::to_json(result.metrics);
    metrics["codec_id"] = codec->id();
    metrics["probe_ber"] = probe.ber;
    metrics["padding_bits"] = result.padding_bits;
    metrics["symbols"] = result.symbols;
    metrics["seed"] = seed;
    std::ofstream(dir / "metrics.json", std::ios::binary) << metrics.dump(2) << '\n';
    fmt::print("{}\n", metrics.dump());
    return 0;
}

spdlog::level::level_enum log_level() {
    const char* env = std::getenv("RYDBERG_SIM_LOG");
    if (!env) return spdlog::level::warn;
    return spdlog::level::from_str(env);
}

}  // namespace

int main(int argc, char** argv) {
    auto logger = spdlog::stderr_color_mt("rydberg-sim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(log_level());

    CLI::App app{"Rydberg atomic receiver OFDM link simulator"};
    app.require_subcommand(1);
    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "experiment config JSON");
        sub->add_option("--out", opt.out_dir, "output directory (overrides output_dir)");
        sub->add_option("--jobs", opt.jobs, "worker threads (default: hardware concurrency)");
        sub->add_option("--seed", opt.seed, "single seed overriding the configured list");
    };
    auto* spectrum = app.add_subcommand("spectrum", "write EIT spectrum CSVs and report AT separations");
    auto* sweep_cmd = app.add_subcommand("ber-sweep", "Monte-Carlo BER over sweep axes x seeds (JSON lines)");
    auto* probe = app.add_subcommand("probe", "BER of a known probe sequence per seed");
    auto* transmit = app.add_subcommand("transmit", "probe, select a codec and send an image");
    for (auto* s : {spectrum, sweep_cmd, probe, transmit}) add_common(s);
    transmit->add_option("--image", opt.image_path, "PGM/PPM image")->required();
    transmit->add_option("--table", opt.table_path, "codec mapping table JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(ExitCode::ConfigError);
    }

    try {
        if (*spectrum) return cmd_spectrum(opt);
        if (*sweep_cmd) return cmd_sweep(opt);
        if (*probe) return cmd_probe(opt);
        if (*transmit) return cmd_transmit(opt);
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const ArgumentError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const DomainError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const nlohmann::json::exception& e) {
        spdlog::error("config: {}", e.what());
        return static_cast<int>(ExitCode::ConfigError);
    } catch (const CodecError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::EnvironmentError);
    } catch (const fs::filesystem_error& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::EnvironmentError);
    } catch (const NumericalError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::NumericalError);
    } catch (const FramingError& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(ExitCode::NumericalError);
    } catch (const std::exception& e) {
        spdlog::error("unexpected: {}", e.what());
        return static_cast<int>(ExitCode::NumericalError);
    }
    return 0;
}
