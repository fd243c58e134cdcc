#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace rydberg::fft {

using cd = std::complex<double>;

enum class Direction { Forward, Inverse };

namespace detail {

struct AlignedBuffer {
    explicit AlignedBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {}
    ~AlignedBuffer() { fftw_free(data); }
    AlignedBuffer(const AlignedBuffer&) = delete;
    AlignedBuffer& operator=(const AlignedBuffer&) = delete;
    fftw_complex* data;
};

// FFTW planning is not thread-safe; executing an existing plan on new
// arrays is. Plans use FFTW_ESTIMATE so the chosen algorithm, and therefore
// every output bit, does not depend on run-time measurements.
inline fftw_plan plan_for(std::size_t n, Direction dir) {
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
    std::scoped_lock lock(mutex);
    const int sign = dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD;
    auto key = std::pair{n, sign};
    if (auto it = plans.find(key); it != plans.end()) return it->second;
    AlignedBuffer in(n), out(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in.data, out.data, sign, FFTW_ESTIMATE);
    plans.emplace(key, plan);
    return plan;
}

}  // namespace detail

/// Unitary DFT: both directions scale by 1/sqrt(n), so energy is preserved.
inline std::vector<cd> unitary_dft(std::span<const cd> input, Direction dir) {
    const std::size_t n = input.size();
    if (n == 0) return {};
    detail::AlignedBuffer in(n), out(n);
    std::memcpy(in.data, input.data(), n * sizeof(cd));
    fftw_execute_dft(detail::plan_for(n, dir), in.data, out.data);
    std::vector<cd> result(n);
    std::memcpy(static_cast<void*>(result.data()), out.data, n * sizeof(cd));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : result) v *= scale;
    return result;
}

/// Inverse DFT with the conventional 1/n scaling.
inline std::vector<cd> inverse_dft(std::span<const cd> input) {
    auto result = unitary_dft(input, Direction::Inverse);
    const double scale = 1.0 / std::sqrt(static_cast<double>(input.size()));
    for (auto& v : result) v *= scale;
    return result;
}

}  // namespace rydberg::fft
