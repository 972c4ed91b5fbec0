#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace qlockin {

/// Lock-in channel selected by the pulse-train timing. The in-phase train
/// (I) rectifies the cosine component of the field, the quadrature train
/// (Q) the sine component.
enum class Channel { I, Q };

inline const char* channel_name(Channel c) { return c == Channel::I ? "I" : "Q"; }

/// Number of pi pulses: 2n for the I train, 2n-1 for the Q train.
inline int pulse_count(Channel channel, int n_cells) {
    return channel == Channel::I ? 2 * n_cells : 2 * n_cells - 1;
}

/// A Carr-Purcell pi-pulse train between the two pi/2 pulses. The filter
/// function w(t) starts at +1 and toggles sign at every pulse time.
struct PulseSequence {
    double tau;                      // reference period, w0 = 2*pi/tau
    int n_cells;                     // n; total duration n*tau
    Channel channel;
    double readout_phase;            // control phase of the final pi/2 pulse
    std::vector<double> pulse_times; // strictly increasing, inside (0, total)
    double total_duration;
};

/// Build the n-cell pulse train for one channel.
///
/// I: pulses at (c + 1/4)*tau and (c + 3/4)*tau in every cell c, 2n total.
/// Q: pulses at j*tau/2 for j = 1..2n-1 (the would-be final pulse merges
///    with readout), shifting the filter by a quarter period.
inline PulseSequence make_sequence(double tau, int n, Channel channel, double readout_phase = 0.0) {
    if (tau <= 0.0) throw std::invalid_argument("make_sequence: tau must be > 0");
    if (n < 1) throw std::invalid_argument("make_sequence: n must be >= 1");

    PulseSequence seq;
    seq.tau = tau;
    seq.n_cells = n;
    seq.channel = channel;
    seq.readout_phase = readout_phase;
    seq.total_duration = n * tau;
    seq.pulse_times.reserve(static_cast<std::size_t>(pulse_count(channel, n)));
    if (channel == Channel::I) {
        for (int c = 0; c < n; ++c) {
            seq.pulse_times.push_back((c + 0.25) * tau);
            seq.pulse_times.push_back((c + 0.75) * tau);
        }
    } else {
        for (int j = 1; j <= 2 * n - 1; ++j)
            seq.pulse_times.push_back(j * tau / 2.0);
    }
    return seq;
}

} // namespace qlockin
