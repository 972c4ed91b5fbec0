#pragma once

#include <stdexcept>
#include <vector>

#include "qlockin/field.hpp"
#include "qlockin/sensor.hpp"
#include "qlockin/sequence.hpp"
#include "qlockin/units.hpp"

namespace qlockin {

namespace detail {

/// Merge pulse times and phase-schedule breakpoints into the ordered edge
/// list of intervals on which both w(t) and every tone phase are constant.
/// Returns edges including 0 and total_duration.
inline std::vector<double> integration_edges(const ACField& field, const PulseSequence& seq) {
    std::vector<double> edges;
    edges.reserve(seq.pulse_times.size() + field.phase_schedule().size() + 2);
    edges.push_back(0.0);
    std::size_t ip = 0, is = 0;
    const auto& pulses = seq.pulse_times;
    const auto& sched = field.phase_schedule();
    while (ip < pulses.size() || is < sched.size()) {
        double tp = ip < pulses.size() ? pulses[ip] : seq.total_duration + 1.0;
        double ts = is < sched.size() ? sched[is].start : seq.total_duration + 1.0;
        double t = std::min(tp, ts);
        if (t >= seq.total_duration) break;
        if (tp <= t) ++ip;
        if (ts <= t) ++is;
        if (t > 0.0 && t > edges.back()) edges.push_back(t);
    }
    edges.push_back(seq.total_duration);
    return edges;
}

/// Exact integral of sum_tones b*cos(2*pi*f*t - theta) * w(t) over the
/// sequence, by summing the antiderivative sin(2*pi*f*t - theta)/(2*pi*f)
/// across the constant-sign intervals of w(t).
inline double filtered_field_integral(const ACField& field, const PulseSequence& seq) {
    const std::vector<double> edges = integration_edges(field, seq);
    double total = 0.0;
    for (const auto& tone : field.tones()) {
        const double w = kTwoPi * tone.frequency;
        double tone_total = 0.0;
        double sign = 1.0;
        std::size_t pulse_idx = 0;
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            const double a = edges[i];
            const double b = edges[i + 1];
            // w(t) toggles at pulse times; count pulses consumed up to `a`.
            while (pulse_idx < seq.pulse_times.size() && seq.pulse_times[pulse_idx] <= a) {
                sign = -sign;
                ++pulse_idx;
            }
            const double theta = field.phase_at(0.5 * (a + b), tone);
            tone_total += sign * (std::sin(w * b - theta) - std::sin(w * a - theta)) / w;
        }
        total += tone.amplitude * tone_total;
    }
    return total;
}

} // namespace detail

/// Quantum phase accumulated over the sequence: integral of
/// gamma_e * bz(t) * w(t) dt, evaluated in closed form. The Q-channel value
/// is negated, defining phi_Q = 2*gamma_e*(-b*sin(theta))*tau/pi per cell so
/// that the lock-in estimators resolve theta over the full circle.
///
/// For a commensurate single tone (f = 1/tau) this returns n * phi with the
/// per-cell phase phi_I = 2*gamma_e*b*cos(theta)*tau/pi on the I channel.
inline double accumulated_phase(const ACField& field, const PulseSequence& seq,
                                const SensorParams& params) {
    const double raw = params.gamma_e * detail::filtered_field_integral(field, seq);
    return seq.channel == Channel::Q ? -raw : raw;
}

/// Coherence envelope D = exp(-(n*tau / (T2 * m^s))^alpha) with the pulse
/// count m = 2n (I) or 2n-1 (Q) entering through the coherence-time
/// enhancement T2^(m) = T2 * m^s.
inline double decoherence(int n, double tau, const SensorParams& params, Channel channel) {
    if (n < 1) throw std::invalid_argument("decoherence: n must be >= 1");
    if (tau <= 0.0) throw std::invalid_argument("decoherence: tau must be > 0");
    const int m = pulse_count(channel, n);
    const double t2_m = params.T2 * std::pow(static_cast<double>(m), params.s_exp);
    return std::exp(-std::pow(n * tau / t2_m, params.alpha_exp));
}

/// Fringe signal S = 2*P(0) - 1 = D(n*tau) * cos(total_phase - Phi).
inline double signal(const ACField& field, const PulseSequence& seq, const SensorParams& params) {
    const double d = decoherence(seq.n_cells, seq.tau, params, seq.channel);
    return d * std::cos(accumulated_phase(field, seq, params) - seq.readout_phase);
}

/// Probability of the bright outcome, P(0) = (1 + S)/2.
inline double bright_probability(const ACField& field, const PulseSequence& seq,
                                 const SensorParams& params) {
    return 0.5 * (1.0 + signal(field, seq, params));
}

/// Reference frequencies allowed by the nuclear-bath revivals:
/// f_p = fL / (2p) with fL = gamma_n * B0 / (2*pi), p = 1..p_max.
inline std::vector<double> allowed_frequencies(const SensorParams& params, int p_max) {
    if (params.B0 <= 0.0)
        throw std::invalid_argument("allowed_frequencies: B0 must be > 0 (no Larmor precession)");
    if (p_max < 1) throw std::invalid_argument("allowed_frequencies: p_max must be >= 1");
    const double f_larmor = params.gamma_n * params.B0 / kTwoPi;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(p_max));
    for (int p = 1; p <= p_max; ++p) out.push_back(f_larmor / (2.0 * p));
    return out;
}

struct NearestAllowedFrequency {
    int p;
    double frequency;         // hertz
    double relative_mismatch; // |f_p - f_target| / f_target
};

/// Closest revival-allowed frequency to a requested working point. Reports
/// the mismatch instead of enforcing the constraint.
inline NearestAllowedFrequency nearest_allowed_frequency(const SensorParams& params,
                                                         double f_target) {
    if (params.B0 <= 0.0)
        throw std::invalid_argument("nearest_allowed_frequency: B0 must be > 0");
    if (f_target <= 0.0)
        throw std::invalid_argument("nearest_allowed_frequency: target frequency must be > 0");
    const double f_larmor = params.gamma_n * params.B0 / kTwoPi;
    int p = static_cast<int>(std::round(f_larmor / (2.0 * f_target)));
    if (p < 1) p = 1;
    NearestAllowedFrequency best{p, f_larmor / (2.0 * p), 0.0};
    for (int cand : {p - 1, p + 1}) {
        if (cand < 1) continue;
        const double f = f_larmor / (2.0 * cand);
        if (std::abs(f - f_target) < std::abs(best.frequency - f_target))
            best = {cand, f, 0.0};
    }
    best.relative_mismatch = std::abs(best.frequency - f_target) / f_target;
    return best;
}

/// Signal versus field frequency for a fixed sequence (theta = 0 tone).
inline std::vector<double> cp_frequency_response(const PulseSequence& seq, double b_ac,
                                                 const std::vector<double>& f_grid,
                                                 const SensorParams& params) {
    std::vector<double> out;
    out.reserve(f_grid.size());
    for (double f : f_grid)
        out.push_back(signal(ACField::single_tone(b_ac, f, 0.0), seq, params));
    return out;
}

} // namespace qlockin
