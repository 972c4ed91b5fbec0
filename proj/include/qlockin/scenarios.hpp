#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qlockin/analysis.hpp"
#include "qlockin/lockin.hpp"
#include "qlockin/pea.hpp"

namespace qlockin {

/// Time series of true versus estimated values, one lock-in time constant
/// per step. Each estimate carries the seed of the substream that produced
/// it.
struct ScenarioTrace {
    std::string channel;              // "I", "Q", or "IQ"
    std::vector<double> time;         // model time at the end of each step
    std::vector<double> true_value;
    std::vector<double> estimate;
    std::vector<std::uint64_t> seeds;
};

struct TelegraphResult {
    ScenarioTrace trace;              // true_value/estimate: theta (0 or pi); estimate is phi_I
    std::vector<double> detected;     // classified phase per step, 0 or pi
    double accuracy = 0.0;
};

/// Track random telegraph phase jumps 0 <-> pi through the I channel. The
/// phase is constant within each step (one full PEA routine) and flips
/// between steps with the given probability; a step is classified as
/// theta = 0 when phi_I >= 0 and theta = pi otherwise.
inline TelegraphResult telegraph_scenario(double b_ac, double flip_probability, int n_steps,
                                          const PEAConfig& config, const SensorParams& params,
                                          const MeasurementModel& model, std::uint64_t master_seed) {
    if (n_steps < 1) throw std::invalid_argument("telegraph_scenario: n_steps must be >= 1");
    if (flip_probability < 0.0 || flip_probability > 1.0)
        throw std::invalid_argument("telegraph_scenario: flip probability must be in [0, 1]");

    PEAConfig cfg = config;
    cfg.channel = Channel::I;
    const double step_time = time_constant(cfg, params);

    TelegraphResult out;
    out.trace.channel = "I";
    Rng phase_rng = Rng::substream(master_seed, 0);
    double theta = 0.0;
    int correct = 0;
    for (int i = 0; i < n_steps; ++i) {
        if (i > 0 && phase_rng.bernoulli(flip_probability)) theta = (theta == 0.0) ? kPi : 0.0;
        Rng rng = Rng::substream(master_seed, static_cast<std::uint64_t>(i) + 1);
        const ACField field = ACField::single_tone(b_ac, 1.0 / cfg.tau, theta);
        const PeaResult res = run_pea(field, cfg, params, model, rng);
        const double detected = res.phi_mle >= 0.0 ? 0.0 : kPi;
        out.trace.time.push_back((i + 1) * step_time);
        out.trace.true_value.push_back(theta);
        out.trace.estimate.push_back(res.phi_mle);
        out.trace.seeds.push_back(rng.seed());
        out.detected.push_back(detected);
        if (detected == theta) ++correct;
    }
    out.accuracy = static_cast<double>(correct) / n_steps;
    return out;
}

/// Distribution of the classical phase between scenario steps.
struct PhaseDistribution {
    enum class Kind { UniformCircle, GaussianWalk };
    Kind kind = Kind::GaussianWalk;
    double sigma = deg_to_rad(1.5); // walk step scale, radians
};

struct RandomPhaseResult {
    ScenarioTrace trace;              // true_value: theta; estimate: theta_est
    double mean_abs_jump_est = 0.0;   // mean |theta_est step| over the trace
    double min_abs_jump_est = 0.0;    // smallest nonzero detected jump
};

/// Dual-channel tracking of arbitrarily distributed phase changes. The
/// phase is constant within each step and redrawn (uniform) or random-walked
/// (gaussian) between steps.
inline RandomPhaseResult random_phase_scenario(double b_ac, const PhaseDistribution& dist,
                                               int n_steps, const PEAConfig& config,
                                               const SensorParams& params,
                                               const MeasurementModel& model,
                                               std::uint64_t master_seed) {
    if (n_steps < 1) throw std::invalid_argument("random_phase_scenario: n_steps must be >= 1");

    const double step_time = 2.0 * time_constant(config, params); // I + Q per step
    RandomPhaseResult out;
    out.trace.channel = "IQ";
    Rng phase_rng = Rng::substream(master_seed, 0);
    double theta = 0.0;
    for (int i = 0; i < n_steps; ++i) {
        if (dist.kind == PhaseDistribution::Kind::UniformCircle)
            theta = wrap_angle(phase_rng.uniform(-kPi, kPi));
        else if (i > 0)
            theta = wrap_angle(theta + phase_rng.normal(0.0, dist.sigma));
        Rng rng = Rng::substream(master_seed, static_cast<std::uint64_t>(i) + 1);
        const ACField field = ACField::single_tone(b_ac, 1.0 / config.tau, theta);
        const LockinResult res = run_dual(field, config, params, model, rng);
        out.trace.time.push_back((i + 1) * step_time);
        out.trace.true_value.push_back(theta);
        out.trace.estimate.push_back(res.theta_est);
        out.trace.seeds.push_back(rng.seed());
    }

    double sum = 0.0, min_jump = 0.0;
    int jumps = 0;
    for (std::size_t i = 1; i < out.trace.estimate.size(); ++i) {
        const double j = std::abs(angle_diff(out.trace.estimate[i], out.trace.estimate[i - 1]));
        if (j == 0.0) continue;
        sum += j;
        min_jump = (jumps == 0) ? j : std::min(min_jump, j);
        ++jumps;
    }
    out.mean_abs_jump_est = jumps > 0 ? sum / jumps : 0.0;
    out.min_abs_jump_est = min_jump;
    return out;
}

struct FreqShiftPoint {
    double df_frac = 0.0;             // delta f / f0
    std::vector<double> phi_Q;        // per trial
    std::vector<double> phi_I;
    std::vector<std::uint64_t> seeds;
};

/// Quadrature readout of a frequency shift: the field tone sits at
/// f0*(1 + df_frac) with theta = 0 at t = 0, so the quadrature component
/// b_Q = b*sin(delta_w * t) grows linearly in the shift and the Q-channel
/// phase resolves its sign, unlike the symmetric in-phase response.
inline std::vector<FreqShiftPoint> frequency_shift_scenario(
    double b_ac, std::span<const double> df_fracs, int trials, const PEAConfig& config,
    const SensorParams& params, const MeasurementModel& model, std::uint64_t master_seed) {
    if (trials < 1) throw std::invalid_argument("frequency_shift_scenario: trials must be >= 1");
    const double f0 = 1.0 / config.tau;
    std::vector<FreqShiftPoint> out;
    out.reserve(df_fracs.size());
    std::uint64_t stream = 0;
    for (double df : df_fracs) {
        FreqShiftPoint pt;
        pt.df_frac = df;
        const ACField field = ACField::single_tone(b_ac, f0 * (1.0 + df), 0.0);
        for (int t = 0; t < trials; ++t) {
            Rng rng = Rng::substream(master_seed, stream++);
            PEAConfig cfg_q = config;
            cfg_q.channel = Channel::Q;
            PEAConfig cfg_i = config;
            cfg_i.channel = Channel::I;
            pt.phi_Q.push_back(run_pea(field, cfg_q, params, model, rng).phi_mle);
            pt.phi_I.push_back(run_pea(field, cfg_i, params, model, rng).phi_mle);
            pt.seeds.push_back(rng.seed());
        }
        out.push_back(std::move(pt));
    }
    return out;
}

struct TwoToneResult {
    double df0_frac = 0.0;
    PosteriorGrid posterior_I;
    PosteriorGrid posterior_Q;
    double mle_I = 0.0;
    double mle_Q = 0.0;
};

/// Two equal-amplitude signals, one on the lock-in frequency and one
/// shifted by df0: returns the I and Q posteriors. At df0 = 0 the tones add
/// coherently and the I posterior peaks at twice the single-tone phase.
inline TwoToneResult two_tone_scenario(double b_ac, double df0_frac, const PEAConfig& config,
                                       const SensorParams& params, const MeasurementModel& model,
                                       std::uint64_t master_seed) {
    const double f0 = 1.0 / config.tau;
    const ACField field = ACField::two_tone(b_ac, f0, f0 * df0_frac);
    PEAConfig cfg_i = config;
    cfg_i.channel = Channel::I;
    PEAConfig cfg_q = config;
    cfg_q.channel = Channel::Q;
    Rng rng_i = Rng::substream(master_seed, 0);
    Rng rng_q = Rng::substream(master_seed, 1);
    PeaResult res_i = run_pea(field, cfg_i, params, model, rng_i);
    PeaResult res_q = run_pea(field, cfg_q, params, model, rng_q);
    TwoToneResult out{df0_frac, std::move(res_i.posterior), std::move(res_q.posterior),
                      res_i.phi_mle, res_q.phi_mle};
    return out;
}

} // namespace qlockin
