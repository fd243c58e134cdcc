#pragma once

// Rydberg-atom response to an RF field: Rabi/field conversion, n-scaling
// laws, steady-state EIT spectra, Autler-Townes peak analysis and the
// per-sample readout transfer used by the channel.

#include "rydberg/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace rydberg::atomic {

/// Reduced Planck constant, J*s. Fixed value, not configurable.
inline constexpr double kHbar = 1.05457e-34;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Four-level ladder: ground -> intermediate (probe), intermediate ->
/// Rydberg 1 (coupling), Rydberg 1 <-> Rydberg 2 (RF).
struct AtomicLevelScheme {
    std::string ground_label = "6S1/2";
    std::string intermediate_label = "6P3/2";
    std::string rydberg1_label = "62D5/2";
    std::string rydberg2_label = "63P3/2";
    int n_rydberg1 = 62;
    double probe_wavelength_nm = 852.0;
    double coupling_wavelength_nm = 509.0;
    double dipole_moment = 1.0e-26;               // C*m, RF transition
    double gamma_intermediate = kTwoPi * 2.6e6;  // rad/s, probe coherence decay
    double gamma_rydberg = kTwoPi * 1.0e4;       // rad/s, Rydberg coherence decay

    static AtomicLevelScheme cesium() { return {}; }
    friend bool operator==(const AtomicLevelScheme&, const AtomicLevelScheme&) = default;

    void validate() const {
        if (!(probe_wavelength_nm > 0 && coupling_wavelength_nm > 0))
            throw DomainError("atomic scheme: wavelengths must be positive");
        if (!(dipole_moment > 0)) throw DomainError("atomic scheme: dipole moment must be positive");
        if (!(gamma_intermediate > 0 && gamma_rydberg > 0))
            throw DomainError("atomic scheme: decay rates must be positive");
        if (n_rydberg1 < 10) throw DomainError("atomic scheme: n_rydberg1 must be >= 10");
    }
};

enum class ReadoutMode { IdealEnvelope, EitNonlinear };

/// Laser and readout state of the receiver.
struct OperatingPoint {
    double probe_rabi = kTwoPi * 0.5e6;
    double coupling_rabi = kTwoPi * 2.0e6;
    double coupling_detuning = 0.0;
    double rf_detuning = 0.0;
    ReadoutMode readout_mode = ReadoutMode::IdealEnvelope;
    double envelope_gain = 1.0;  // detector gain applied in both readout modes
    double optical_depth = 1.0;  // on-resonance probe optical depth without EIT

    friend bool operator==(const OperatingPoint&, const OperatingPoint&) = default;

    void validate() const {
        if (!(probe_rabi > 0)) throw DomainError("operating point: probe_rabi must be positive");
        if (!(probe_rabi < coupling_rabi))
            throw DomainError("operating point: weak-probe regime requires probe_rabi < coupling_rabi");
        if (!(optical_depth > 0)) throw DomainError("operating point: optical_depth must be positive");
        if (!(envelope_gain > 0)) throw DomainError("operating point: envelope_gain must be positive");
    }
};

inline double rabi_to_field(double omega, double dipole_moment) {
    if (!(dipole_moment > 0)) throw DomainError("rabi_to_field: dipole moment must be positive");
    if (omega < 0) throw DomainError("rabi_to_field: omega must be nonnegative");
    return kHbar * omega / dipole_moment;
}

inline double field_to_rabi(double field, double dipole_moment) {
    if (!(dipole_moment > 0)) throw DomainError("field_to_rabi: dipole moment must be positive");
    if (field < 0) throw DomainError("field_to_rabi: field must be nonnegative");
    return field * dipole_moment / kHbar;
}

struct RabiField {
    double omega = 0.0;
    double field_amplitude = 0.0;
    double dipole_moment = 1.0e-26;

    static RabiField from_rabi(double omega, double d) { return {omega, rabi_to_field(omega, d), d}; }
    static RabiField from_field(double e, double d) { return {field_to_rabi(e, d), e, d}; }
};

enum class ScalingProperty { OrbitalRadius, Lifetime, Polarizability };

constexpr int scaling_exponent(ScalingProperty p) {
    switch (p) {
        case ScalingProperty::OrbitalRadius: return 2;
        case ScalingProperty::Lifetime: return 3;
        case ScalingProperty::Polarizability: return 7;
    }
    return 0;
}

/// Exact rational (n_to/n_from)^p kept in lowest terms so that chained
/// ratios compose without rounding.
struct ScalingRatio {
    std::uint64_t numerator = 1;
    std::uint64_t denominator = 1;

    double value() const { return static_cast<double>(numerator) / static_cast<double>(denominator); }

    friend ScalingRatio operator*(const ScalingRatio& a, const ScalingRatio& b) {
        using u128 = unsigned __int128;
        u128 num = static_cast<u128>(a.numerator) * b.numerator;
        u128 den = static_cast<u128>(a.denominator) * b.denominator;
        u128 x = num, y = den;
        while (y != 0) {
            u128 t = x % y;
            x = y;
            y = t;
        }
        num /= x;
        den /= x;
        if (num > std::numeric_limits<std::uint64_t>::max() || den > std::numeric_limits<std::uint64_t>::max())
            throw DomainError("scaling ratio overflow");
        return {static_cast<std::uint64_t>(num), static_cast<std::uint64_t>(den)};
    }
    friend bool operator==(const ScalingRatio&, const ScalingRatio&) = default;
};

inline constexpr int kMinRydbergN = 10;
inline constexpr int kMaxRydbergN = 500;  // 500^7 still fits in 64 bits

inline ScalingRatio scaling_ratio_exact(ScalingProperty property, int n_from, int n_to) {
    if (n_from < kMinRydbergN || n_to < kMinRydbergN)
        throw DomainError("scaling_ratio: principal quantum number below the Rydberg regime (n >= 10)");
    if (n_from > kMaxRydbergN || n_to > kMaxRydbergN) throw DomainError("scaling_ratio: n above 500");
    const auto g = static_cast<std::uint64_t>(std::gcd(n_from, n_to));
    const std::uint64_t a = static_cast<std::uint64_t>(n_to) / g;
    const std::uint64_t b = static_cast<std::uint64_t>(n_from) / g;
    ScalingRatio r;
    for (int i = 0; i < scaling_exponent(property); ++i) {
        r.numerator *= a;
        r.denominator *= b;
    }
    return r;
}

inline double scaling_ratio(ScalingProperty property, int n_from, int n_to) {
    return scaling_ratio_exact(property, n_from, n_to).value();
}

struct EitSpectrum {
    std::vector<double> detunings;
    std::vector<double> transmission;
    double rf_rabi = 0.0;

    void validate() const {
        if (detunings.size() != transmission.size()) throw ArgumentError("spectrum: array length mismatch");
        if (detunings.size() < 3) throw ArgumentError("spectrum: at least 3 points required");
        for (std::size_t i = 1; i < detunings.size(); ++i)
            if (!(detunings[i] > detunings[i - 1])) throw ArgumentError("spectrum: detunings must be strictly increasing");
        for (double t : transmission)
            if (!(t >= 0.0 && t <= 1.0)) throw ArgumentError("spectrum: transmission outside [0, 1]");
    }
};

/// Weak-probe steady-state absorption of the ladder, normalised so that the
/// bare two-level line has peak value 1 at resonance.
inline double probe_absorption(const AtomicLevelScheme& scheme, const OperatingPoint& op, double rf_rabi,
                               double probe_detuning) {
    using cd = std::complex<double>;
    constexpr cd i{0.0, 1.0};
    const double g2 = scheme.gamma_intermediate;
    const double g3 = scheme.gamma_rydberg;
    const double g4 = scheme.gamma_rydberg;
    const double d2 = probe_detuning;
    const double d3 = d2 + op.coupling_detuning;
    const double d4 = d3 + op.rf_detuning;
    const cd rydberg2 = g4 - i * d4;
    const cd rydberg1 = g3 - i * d3 + (rf_rabi * rf_rabi / 4.0) / rydberg2;
    const cd intermediate = g2 - i * d2 + (op.coupling_rabi * op.coupling_rabi / 4.0) / rydberg1;
    return (g2 / intermediate).real();
}

inline double probe_transmission(const AtomicLevelScheme& scheme, const OperatingPoint& op, double rf_rabi,
                                 double probe_detuning) {
    return std::exp(-op.optical_depth * probe_absorption(scheme, op, rf_rabi, probe_detuning));
}

inline std::vector<double> uniform_detuning_grid(double half_span, std::size_t points) {
    if (points < 3 || !(half_span > 0)) throw ArgumentError("detuning grid: need >= 3 points and positive span");
    std::vector<double> grid(points);
    const double step = 2.0 * half_span / static_cast<double>(points - 1);
    // Symmetric construction: grid[k] == -grid[points - 1 - k] exactly.
    for (std::size_t k = 0; k < points; ++k) {
        const double offset = (static_cast<double>(k) - static_cast<double>(points - 1) / 2.0) * step;
        grid[k] = offset;
    }
    return grid;
}

inline EitSpectrum eit_spectrum(const AtomicLevelScheme& scheme, const OperatingPoint& op, double rf_rabi,
                                std::span<const double> detuning_grid) {
    if (detuning_grid.empty()) throw ArgumentError("eit_spectrum: empty detuning grid");
    for (std::size_t k = 1; k < detuning_grid.size(); ++k)
        if (!(detuning_grid[k] > detuning_grid[k - 1]))
            throw ArgumentError("eit_spectrum: detuning grid must be strictly increasing");
    scheme.validate();
    op.validate();
    if (rf_rabi < 0) throw DomainError("eit_spectrum: rf_rabi must be nonnegative");
    EitSpectrum s;
    s.rf_rabi = rf_rabi;
    s.detunings.assign(detuning_grid.begin(), detuning_grid.end());
    s.transmission.reserve(detuning_grid.size());
    for (double d : detuning_grid) s.transmission.push_back(probe_transmission(scheme, op, rf_rabi, d));
    return s;
}

struct Peak {
    std::size_t index = 0;
    double position = 0.0;  // refined detuning
    double height = 0.0;
    double prominence = 0.0;
};

inline constexpr double kDefaultProminence = 0.05;

namespace detail {

// Vertex of the parabola through three points.
inline double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (curvature >= 0.0) return x1;
    return 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
}

}  // namespace detail

/// Interior local maxima whose topographic prominence is at least
/// `prominence_fraction` of the spectrum's range. Searching to the left stops
/// at strictly higher samples, to the right at higher-or-equal ones, so of two
/// equal peaks exactly one carries the shared prominence.
inline std::vector<Peak> find_peaks(const EitSpectrum& spectrum, double prominence_fraction = kDefaultProminence) {
    spectrum.validate();
    const auto& x = spectrum.detunings;
    const auto& y = spectrum.transmission;
    const std::size_t n = y.size();
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double threshold = prominence_fraction * (*hi - *lo);

    std::vector<Peak> peaks;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (!(y[k] > y[k - 1])) continue;
        // A flat top counts once, from its first sample.
        std::size_t e = k;
        while (e + 1 < n && y[e + 1] == y[k]) ++e;
        if (e + 1 >= n || !(y[e + 1] < y[k])) continue;
        double left_min = y[k];
        for (std::size_t j = k; j-- > 0;) {
            if (y[j] > y[k]) break;
            left_min = std::min(left_min, y[j]);
        }
        double right_min = y[k];
        for (std::size_t j = e + 1; j < n; ++j) {
            if (y[j] >= y[k]) break;
            right_min = std::min(right_min, y[j]);
        }
        const double prominence = y[k] - std::max(left_min, right_min);
        if (prominence <= 0.0 || prominence < threshold) continue;
        Peak p;
        p.index = k;
        p.height = y[k];
        p.prominence = prominence;
        p.position = e == k ? detail::parabola_vertex(x[k - 1], y[k - 1], x[k], y[k], x[k + 1], y[k + 1])
                            : 0.5 * (x[k] + x[e]);
        peaks.push_back(p);
    }
    return peaks;
}

/// Detuning difference between the two Autler-Townes peaks.
inline double at_separation(const EitSpectrum& spectrum, double prominence_fraction = kDefaultProminence) {
    const auto peaks = find_peaks(spectrum, prominence_fraction);
    if (peaks.size() < 2)
        throw UnsplitSpectrumError("unsplit spectrum: field below splitting resolution");
    if (peaks.size() > 2)
        throw MalformedSpectrumError("malformed spectrum: " + std::to_string(peaks.size()) + " qualifying peaks");
    return peaks[1].position - peaks[0].position;
}

inline double estimate_field(const EitSpectrum& spectrum, double dipole_moment,
                             double prominence_fraction = kDefaultProminence) {
    return rabi_to_field(at_separation(spectrum, prominence_fraction), dipole_moment);
}

/// Full width at half prominence of the most prominent peak, with linear
/// interpolation of both crossings.
inline double peak_width(const EitSpectrum& spectrum, double prominence_fraction = kDefaultProminence) {
    const auto peaks = find_peaks(spectrum, prominence_fraction);
    if (peaks.empty()) throw NumericalError("peak_width: no qualifying peak");
    const Peak& p = *std::max_element(peaks.begin(), peaks.end(),
                                      [](const Peak& a, const Peak& b) { return a.prominence < b.prominence; });
    const auto& x = spectrum.detunings;
    const auto& y = spectrum.transmission;
    const double level = p.height - p.prominence / 2.0;
    auto crossing = [&](std::size_t inside, std::size_t outside) {
        const double t = (y[inside] - level) / (y[inside] - y[outside]);
        return x[inside] + t * (x[outside] - x[inside]);
    };
    std::size_t l = p.index;
    while (l > 0 && y[l - 1] >= level) --l;
    std::size_t r = p.index;
    while (r + 1 < y.size() && y[r + 1] >= level) ++r;
    const double left = l > 0 ? crossing(l, l - 1) : x.front();
    const double right = r + 1 < y.size() ? crossing(r, r + 1) : x.back();
    return right - left;
}

/// Detector output for an instantaneous RF field amplitude (V/m).
///
/// IdealEnvelope: envelope_gain * amplitude.
/// EitNonlinear: envelope_gain * (T0 - T(amplitude)) / (T0 - T_inf), the
/// drop in on-resonance probe transmission normalised to its saturation
/// value, where T0 is the EIT peak without RF and T_inf = exp(-optical_depth)
/// is the fully split limit. Zero at zero field, monotone, saturating at
/// envelope_gain.
inline double atomic_transfer(double amplitude, const OperatingPoint& op,
                              const AtomicLevelScheme& scheme = AtomicLevelScheme::cesium()) {
    if (!(amplitude >= 0.0)) throw DomainError("atomic_transfer: negative field amplitude");
    if (op.readout_mode == ReadoutMode::IdealEnvelope) return op.envelope_gain * amplitude;
    const double rf_rabi = field_to_rabi(amplitude, scheme.dipole_moment);
    const double t0 = probe_transmission(scheme, op, 0.0, 0.0);
    const double t_inf = std::exp(-op.optical_depth);
    const double t = probe_transmission(scheme, op, rf_rabi, 0.0);
    return op.envelope_gain * (t0 - t) / (t0 - t_inf);
}

}  // namespace rydberg::atomic
