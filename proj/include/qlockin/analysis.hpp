#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlockin/lockin.hpp"
#include "qlockin/pea.hpp"
#include "qlockin/physics.hpp"

namespace qlockin {

/// Sensitivity/dynamic-range summary for one method at one working point.
struct SensitivityReport {
    std::string method;   // "CP-2n" (with n spelled out, e.g. "CP-16") or "PEA"
    double b_ac = 0.0;    // tesla, probe amplitude
    double eta = 0.0;     // T / sqrt(Hz)
    double delta_b = 0.0; // tesla at the integration budget
    double b_max = 0.0;   // tesla, maximum unambiguous field
    double dynamic_range = 0.0; // b_max / delta_b
};

/// Shot-noise sensitivity of a CP-2n sequence at slope readout
/// (Phi = pi/2):
///
///   eta = (1 / (V*sqrt(xi))) * pi / (2*gamma_e*sqrt(n*tau) * D(n*tau) * |cos(n*phi_I)|)
///
/// with phi_I the per-cell phase of the probe field at theta = 0. Returns
/// +infinity when cos(n*phi_I) = 0 (fringe extremum, zero slope).
inline double cp_sensitivity(double b_ac, int n, double tau, const SensorParams& params) {
    if (n < 1) throw std::invalid_argument("cp_sensitivity: n must be >= 1");
    if (tau <= 0.0) throw std::invalid_argument("cp_sensitivity: tau must be > 0");
    const double phi_cell = 2.0 * params.gamma_e * b_ac * tau / kPi;
    const double slope = std::abs(std::cos(n * phi_cell));
    const double d = decoherence(n, tau, params, Channel::I);
    if (slope == 0.0) return std::numeric_limits<double>::infinity();
    return (1.0 / (params.visibility * std::sqrt(params.collection_factor))) * kPi /
           (2.0 * params.gamma_e * std::sqrt(n * tau) * d * slope);
}

/// Maximum detectable field of the phase estimation readout,
/// b_max = pi * w0 / (4 * gamma_e) with w0 = 2*pi/tau (per-cell phase +-pi).
inline double b_ac_max(double tau, const SensorParams& params) {
    if (tau <= 0.0) throw std::invalid_argument("b_ac_max: tau must be > 0");
    return kPi * (kTwoPi / tau) / (4.0 * params.gamma_e);
}

/// Maximum unambiguous field of a bare CP-2n readout: the inverse-cosine
/// branch restricts the per-cell phase to (-pi/2n, pi/2n), i.e. b_max/(2n).
inline double cp_unambiguous_b_max(double tau, int n, const SensorParams& params) {
    if (n < 1) throw std::invalid_argument("cp_unambiguous_b_max: n must be >= 1");
    return b_ac_max(tau, params) / (2.0 * n);
}

/// Minimum detectable field of a CP-2n readout under the digitized
/// measurement model (bits of fidelity f, R repetitions each), at a fixed
/// time budget. Binomial noise on the bit fraction propagates through the
/// fringe slope at control phase pi/2:
///
///   sigma_phi = 1 / (sqrt(N) * n * (2f-1) * D * |cos(n*phi_I)|),
///   N = T / (R * n * (tau + t_M)),  delta_b = pi*sigma_phi / (2*gamma_e*tau).
///
/// Using the same (f, R) resource as the phase estimation runs makes the
/// dynamic-range comparison independent of the photon collection factor.
inline double cp_bit_delta_b(double b_ac, int n, double tau, const SensorParams& params,
                             double time_budget) {
    if (time_budget <= 0.0) throw std::invalid_argument("cp_bit_delta_b: time budget must be > 0");
    const double bits = time_budget /
                        (static_cast<double>(params.R_reps) * n * (tau + params.t_M));
    const double phi_cell = 2.0 * params.gamma_e * b_ac * tau / kPi;
    const double slope = std::abs(std::cos(n * phi_cell));
    const double d = decoherence(n, tau, params, Channel::I);
    if (slope == 0.0 || bits <= 0.0) return std::numeric_limits<double>::infinity();
    const double sigma_phi =
        1.0 / (std::sqrt(bits) * n * (2.0 * params.readout_fidelity - 1.0) * d * slope);
    return kPi * sigma_phi / (2.0 * params.gamma_e * tau);
}

/// Sample standard deviation of a phase-readout ensemble, circular-aware:
/// deviations are wrapped around the circle relative to the circular mean.
inline double phase_spread(std::span<const double> phis) {
    if (phis.size() < 2) throw std::invalid_argument("phase_spread: need >= 2 samples");
    double s = 0.0, c = 0.0;
    for (double p : phis) {
        s += std::sin(p);
        c += std::cos(p);
    }
    const double mean = std::atan2(s, c);
    double sum_sq = 0.0;
    for (double p : phis) {
        const double d = angle_diff(p, mean);
        sum_sq += d * d;
    }
    return std::sqrt(sum_sq / (static_cast<double>(phis.size()) - 1.0));
}

/// Minimum detectable field from an ensemble of phase-estimation readouts:
/// delta_b = pi * sigma_phi / (2 * gamma_e * tau).
inline double pea_delta_b(std::span<const double> phi_ensemble, double tau,
                          const SensorParams& params) {
    if (phi_ensemble.size() < 30)
        throw std::invalid_argument("pea_delta_b: need an ensemble of >= 30 readouts");
    return kPi * phase_spread(phi_ensemble) / (2.0 * params.gamma_e * tau);
}

/// Rescale a single-run delta_b to a fixed integration budget: repeated
/// estimates average down as 1/sqrt(T), so delta_b(T) = delta_b * sqrt(T_run/T).
inline double delta_b_at_budget(double delta_b_single, double run_time, double time_budget) {
    if (run_time <= 0.0 || time_budget <= 0.0)
        throw std::invalid_argument("delta_b_at_budget: times must be > 0");
    return delta_b_single * std::sqrt(run_time / time_budget);
}

/// Closed-form total cell count of one PEA routine:
/// sum over k of M(K,k)*2^(k-1) = M_K*(2^K - 1) + F*(2^K - K - 1).
inline long long time_constant_cells(int K, int M_K, int F) {
    if (K < 1) throw std::invalid_argument("time_constant_cells: K must be >= 1");
    const long long two_k = 1LL << K;
    return static_cast<long long>(M_K) * (two_k - 1) + static_cast<long long>(F) * (two_k - K - 1);
}

/// Lock-in time constant T = R*(tau + t_M) * [M_K(2^K - 1) + F(2^K - K - 1)].
inline double time_constant(const PEAConfig& config, const SensorParams& params) {
    config.validate();
    return static_cast<double>(time_constant_cells(config.K, config.M_K, config.F)) *
           static_cast<double>(params.R_reps) * (config.tau + params.t_M);
}

/// Largest K whose longest sequence 2^(K-1)*tau still fits the given
/// length; used to sweep the time constant at a fixed longest sequence.
inline int max_levels_for_longest(double tau, double longest_sequence) {
    if (tau <= 0.0 || longest_sequence < tau)
        throw std::invalid_argument("max_levels_for_longest: need tau in (0, longest]");
    int K = 1;
    while ((1LL << K) * tau <= longest_sequence) ++K;
    return K;
}

struct DRComparison {
    SensitivityReport pea;
    SensitivityReport cp;
};

/// The CP-versus-PEA dynamic-range comparison at a fixed time budget. The
/// PEA delta_b comes from a seeded Monte Carlo ensemble at the probe
/// amplitude; the CP-2n delta_b is evaluated at its optimal working point
/// under the same digitized measurement resource.
inline DRComparison dynamic_range_comparison(double b_probe, int n_cp, const PEAConfig& config,
                                             const SensorParams& params,
                                             const MeasurementModel& model, int trials,
                                             double time_budget, std::uint64_t master_seed) {
    if (trials < 30) throw std::invalid_argument("dynamic_range_comparison: need >= 30 trials");
    const ACField field = ACField::single_tone(b_probe, 1.0 / config.tau, 0.0);
    std::vector<double> phis;
    phis.reserve(static_cast<std::size_t>(trials));
    double run_time = 0.0;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::substream(master_seed, static_cast<std::uint64_t>(t));
        const PeaResult res = run_pea(field, config, params, model, rng);
        phis.push_back(res.phi_mle);
        run_time = res.model_time;
    }

    DRComparison out;
    out.pea.method = "PEA";
    out.pea.b_ac = b_probe;
    out.pea.delta_b = delta_b_at_budget(pea_delta_b(phis, config.tau, params), run_time, time_budget);
    out.pea.eta = out.pea.delta_b * std::sqrt(time_budget);
    out.pea.b_max = b_ac_max(config.tau, params);
    out.pea.dynamic_range = out.pea.b_max / out.pea.delta_b;

    out.cp.method = "CP-" + std::to_string(2 * n_cp);
    out.cp.b_ac = 0.0; // optimal working point
    out.cp.delta_b = cp_bit_delta_b(0.0, n_cp, config.tau, params, time_budget);
    out.cp.eta = out.cp.delta_b * std::sqrt(time_budget);
    out.cp.b_max = cp_unambiguous_b_max(config.tau, n_cp, params);
    out.cp.dynamic_range = out.cp.b_max / out.cp.delta_b;
    return out;
}

} // namespace qlockin
