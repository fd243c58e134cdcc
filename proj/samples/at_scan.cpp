// Autler-Townes separation and field estimate over a range of RF strengths.

#include "rydberg/atomic.hpp"
#include "rydberg/errors.hpp"

#include <cstdio>

using namespace rydberg::atomic;

int main() {
    const auto scheme = AtomicLevelScheme::cesium();
    const OperatingPoint op;
    const auto grid = uniform_detuning_grid(kTwoPi * 15e6, 4001);
    std::printf("%12s %6s %16s %14s\n", "rf_MHz", "peaks", "separation_MHz", "field_V_per_m");
    for (double mhz : {0.0, 0.05, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const auto s = eit_spectrum(scheme, op, kTwoPi * mhz * 1e6, grid);
        const auto n = find_peaks(s).size();
        if (n == 2) {
            std::printf("%12.2f %6zu %16.4f %14.6f\n", mhz, n, at_separation(s) / kTwoPi / 1e6,
                        estimate_field(s, scheme.dipole_moment));
        } else {
            std::printf("%12.2f %6zu %16s %14s\n", mhz, n, "unsplit", "-");
        }
    }
}
