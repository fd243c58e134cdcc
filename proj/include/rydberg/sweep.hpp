#pragma once

// Monte-Carlo BER sweeps: (sweep point x seed) tasks on a worker pool, one
// JSON line per task written in canonical task order, resumable.

#include "rydberg/config.hpp"
#include "rydberg/errors.hpp"
#include "rydberg/link.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace rydberg::sweep {

using nlohmann::json;

struct Task {
    std::size_t point = 0;
    std::uint64_t seed = 0;
};

/// Point-major, seeds in configured order.
inline std::vector<Task> canonical_tasks(std::size_t n_points, const std::vector<std::uint64_t>& seeds) {
    std::vector<Task> tasks;
    tasks.reserve(n_points * seeds.size());
    for (std::size_t p = 0; p < n_points; ++p)
        for (auto s : seeds) tasks.push_back({p, s});
    return tasks;
}

inline json report_json(const config::SweepPoint& point, const rx::BerReport& r) {
    return {{"point", point.index},   {"config", point.params},         {"seed", r.seed},
            {"bits_total", r.bits_total}, {"bit_errors", r.bit_errors}, {"ber", r.ber},
            {"degenerate_bins", r.degenerate_bins}};
}

inline rx::BerReport run_task(const config::SweepPoint& point, std::uint64_t seed, std::size_t n_bits) {
    const auto model = config::resolve_channel(point.channel, point.ofdm);
    return link::probe(point.ofdm, model, n_bits, seed);
}

inline std::string run_task_line(const config::SweepPoint& point, std::uint64_t seed, std::size_t n_bits) {
    return report_json(point, run_task(point, seed, n_bits)).dump() + "\n";
}

namespace detail {

// Complete lines already on disk that match the canonical task prefix.
inline std::size_t valid_prefix(const std::filesystem::path& path, const std::vector<Task>& tasks,
                                std::uintmax_t& bytes) {
    bytes = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) return 0;
    std::size_t n = 0;
    std::string line;
    while (n < tasks.size() && std::getline(in, line)) {
        if (in.eof()) break;  // no trailing newline: partial write
        try {
            const auto j = json::parse(line);
            if (j.at("point").get<std::size_t>() != tasks[n].point || j.at("seed").get<std::uint64_t>() != tasks[n].seed)
                break;
        } catch (const std::exception&) {
            break;
        }
        bytes += line.size() + 1;
        ++n;
    }
    return n;
}

}  // namespace detail

struct SweepResult {
    std::size_t tasks = 0;
    std::size_t resumed = 0;  // tasks found complete on disk
};

/// Runs every task of `cfg` into `out_path`. Lines already present and in
/// canonical order are kept; anything after the first mismatch or partial
/// line is discarded and recomputed. Output bytes do not depend on `jobs`.
inline SweepResult run_sweep(const config::ExperimentConfig& cfg, const std::filesystem::path& out_path,
                             unsigned jobs = 1, const std::function<void(std::size_t, std::size_t)>& progress = {}) {
    const auto points = config::expand_sweep(cfg);
    const auto tasks = canonical_tasks(points.size(), cfg.seeds);

    std::uintmax_t keep_bytes = 0;
    const std::size_t done = detail::valid_prefix(out_path, tasks, keep_bytes);
    if (std::filesystem::exists(out_path)) std::filesystem::resize_file(out_path, keep_bytes);
    std::ofstream out(out_path, std::ios::binary | std::ios::app);
    if (!out) throw ConfigError("sweep: cannot write " + out_path.string());

    const std::size_t remaining = tasks.size() - done;
    std::vector<std::optional<std::string>> lines(remaining);
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::size_t written = 0;
    std::exception_ptr failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= remaining) return;
            {
                std::lock_guard lock(mu);
                if (failure) return;
            }
            const auto& t = tasks[done + i];
            std::string line;
            try {
                line = run_task_line(points[t.point], t.seed, cfg.n_bits);
            } catch (...) {
                std::lock_guard lock(mu);
                if (!failure) failure = std::current_exception();
                return;
            }
            std::lock_guard lock(mu);
            lines[i] = std::move(line);
            while (written < remaining && lines[written]) {
                out << *lines[written];
                lines[written].reset();
                ++written;
            }
            out.flush();
            if (progress) progress(done + written, tasks.size());
        }
    };

    const unsigned n_workers = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(remaining, 1))));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return {tasks.size(), done};
}

struct PointSummary {
    std::size_t point = 0;
    json params;
    std::size_t runs = 0;
    double mean_ber = 0.0;
    double std_ber = 0.0;  // sample standard deviation, 0 for a single run
};

/// Per-point mean / std of BER from a sweep file.
inline std::vector<PointSummary> summarize(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("sweep: cannot read " + path.string());
    std::vector<PointSummary> out;
    std::vector<std::vector<double>> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        const auto p = j.at("point").get<std::size_t>();
        if (p >= out.size()) {
            out.resize(p + 1);
            values.resize(p + 1);
        }
        out[p].point = p;
        out[p].params = j.at("config");
        values[p].push_back(j.at("ber").get<double>());
    }
    for (std::size_t p = 0; p < out.size(); ++p) {
        const auto& v = values[p];
        out[p].runs = v.size();
        if (v.empty()) continue;
        double sum = 0;
        for (double x : v) sum += x;
        const double mean = sum / static_cast<double>(v.size());
        double ss = 0;
        for (double x : v) ss += (x - mean) * (x - mean);
        out[p].mean_ber = mean;
        out[p].std_ber = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    }
    return out;
}

}  // namespace rydberg::sweep
