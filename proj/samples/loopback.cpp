// Random bits through the full link at a few SNRs, for each QAM order.

#include "rydberg/config.hpp"
#include "rydberg/link.hpp"

#include <cstdio>

using namespace rydberg;

int main() {
    std::printf("%6s %8s %12s\n", "qam", "snr_db", "ber");
    for (int order : {4, 16, 64}) {
        ofdm::OfdmConfig c;
        c.n_subcarriers = 256;
        c.qam_order = order;
        for (double snr : {6.0, 12.0, 18.0, 24.0}) {
            config::ChannelSpec spec;
            spec.snr_db = snr;
            const auto model = config::resolve_channel(spec, c);
            std::printf("%6d %8.1f %12.3e\n", order, snr, link::probe_ber(c, model, 100'000, 1));
        }
    }
}
