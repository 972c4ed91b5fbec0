#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <vector>

#include "qlockin/field.hpp"
#include "qlockin/physics.hpp"
#include "qlockin/posterior.hpp"
#include "qlockin/readout.hpp"
#include "qlockin/rng.hpp"
#include "qlockin/sensor.hpp"
#include "qlockin/sequence.hpp"

namespace qlockin {

enum class LevelOrder { LongestFirst, ShortestFirst };

/// Parameters of the phase estimation routine: K levels with n = 2^(k-1)
/// cells, M(K,k) = M_K + F*(K-k) repetitions per level, readout phases
/// cycled per level, and a uniform posterior grid over the base phase.
struct PEAConfig {
    int K = 5;
    int M_K = 4;
    int F = 4;
    std::vector<double> readout_phases = {0.0, 0.5 * kPi};
    int grid_size = 4096;
    Channel channel = Channel::I;
    double tau = 0.0; // seconds; required
    LevelOrder order = LevelOrder::LongestFirst;
    bool interleaved = false; // dual-channel runs alternate channels per level

    void validate() const {
        if (K < 1) throw std::invalid_argument("PEAConfig: K must be >= 1");
        if (M_K < 1) throw std::invalid_argument("PEAConfig: M_K must be >= 1");
        if (F < 0) throw std::invalid_argument("PEAConfig: F must be >= 0");
        if (grid_size < 2) throw std::invalid_argument("PEAConfig: grid_size must be >= 2");
        if (tau <= 0.0) throw std::invalid_argument("PEAConfig: tau must be > 0");
        if (readout_phases.empty())
            throw std::invalid_argument("PEAConfig: at least one readout phase required");
    }
};

/// Repetition weighting M(K,k) = M_K + F*(K-k).
inline int weight(int K, int k, int M_K, int F) {
    if (k < 1 || k > K) throw std::invalid_argument("weight: require 1 <= k <= K");
    return M_K + F * (K - k);
}

/// One recorded measurement: level k, cell count n, control phase, the
/// repetition index within the level/phase block, and the outcome u = +/-1.
struct BitRecord {
    int k;
    int n;
    double control_phase;
    int repetition;
    int outcome;
};

/// Audit export, one CSV row per bit: k,n,Phi,rep,u.
inline void write_bit_log_csv(std::ostream& os, std::span<const BitRecord> bits) {
    os << "k,n,Phi,rep,u\n";
    for (const auto& b : bits)
        os << b.k << ',' << b.n << ',' << b.control_phase << ',' << b.repetition << ','
           << (b.outcome > 0 ? '+' : '-') << '\n';
}

struct PeaResult {
    double phi_mle = 0.0;
    bool degenerate = false;
    PosteriorGrid posterior;
    std::vector<BitRecord> bits;
    long long sequence_cells = 0; // sum over levels of M(K,k) * 2^(k-1)
    double model_time = 0.0;      // sequence_cells * R * (tau + t_M)
};

namespace detail {

/// Draws the bits of one PEA level on one channel and folds their
/// likelihoods into the posterior. Shared by the single-channel and the
/// interleaved dual-channel drivers.
struct PeaAccumulator {
    PosteriorGrid posterior;
    std::vector<BitRecord> bits;
    long long sequence_cells = 0;

    explicit PeaAccumulator(int grid_size) : posterior(grid_size) {}

    void run_level(int k, const ACField& field, const PEAConfig& config, Channel channel,
                   const SensorParams& params, const MeasurementModel& model, Rng& rng) {
        const int n = 1 << (k - 1);
        const int reps = weight(config.K, k, config.M_K, config.F);
        const double d = decoherence(n, config.tau, params, channel);
        const double f = model.bit_fidelity();
        sequence_cells += static_cast<long long>(reps) * n;
        for (double control_phase : config.readout_phases) {
            const PulseSequence seq = make_sequence(config.tau, n, channel, control_phase);
            const double s_true = signal(field, seq, params);
            int m_plus = 0;
            for (int r = 0; r < reps; ++r) {
                const int u = measure_bit(s_true, model, rng);
                if (u > 0) ++m_plus;
                bits.push_back({k, n, control_phase, r, u});
            }
            const int m_minus = reps - m_plus;
            posterior.update([&](double phi) {
                const double lp = likelihood(+1, phi, n, control_phase, d, f);
                double lw = 0.0;
                if (m_plus > 0) lw += m_plus * std::log(std::max(lp, 1e-300));
                if (m_minus > 0) lw += m_minus * std::log(std::max(1.0 - lp, 1e-300));
                return lw;
            });
        }
    }
};

inline std::vector<int> level_schedule(const PEAConfig& config) {
    std::vector<int> ks;
    ks.reserve(static_cast<std::size_t>(config.K));
    if (config.order == LevelOrder::LongestFirst)
        for (int k = config.K; k >= 1; --k) ks.push_back(k);
    else
        for (int k = 1; k <= config.K; ++k) ks.push_back(k);
    return ks;
}

} // namespace detail

/// Run the phase estimation routine on one channel: for each level draw
/// M(K,k) bits per readout phase from the true field signal (decoherence
/// included), accumulate the bit likelihoods on the posterior grid, and
/// return the maximum-likelihood base phase.
///
/// The posterior variable is the n = 1 per-cell phase; level k contributes
/// likelihoods in cos(n*phi - Phi) with n = 2^(k-1). Model time follows the
/// lock-in bookkeeping sum over levels of M(K,k)*2^(k-1)*R*(tau + t_M),
/// counted once per level regardless of how many readout phases cycle.
inline PeaResult run_pea(const ACField& field, const PEAConfig& config, const SensorParams& params,
                         const MeasurementModel& model, Rng& rng) {
    config.validate();
    params.validate();
    detail::PeaAccumulator acc(config.grid_size);
    for (int k : detail::level_schedule(config))
        acc.run_level(k, field, config, config.channel, params, model, rng);
    PeaResult result{0.0, false, std::move(acc.posterior), std::move(acc.bits), acc.sequence_cells, 0.0};
    result.model_time = static_cast<double>(acc.sequence_cells) *
                        static_cast<double>(params.R_reps) * (config.tau + params.t_M);
    const MleEstimate est = mle(result.posterior);
    result.phi_mle = est.phi;
    result.degenerate = est.degenerate;
    return result;
}

/// Rebuild a posterior from a recorded bit log (order-independent up to
/// floating-point reassociation). Audit path; uses the same likelihood as
/// run_pea.
inline PosteriorGrid replay_bits(std::span<const BitRecord> bits, const PEAConfig& config,
                                 const SensorParams& params, double bit_fidelity) {
    PosteriorGrid posterior(config.grid_size);
    for (const auto& b : bits) {
        const double d = decoherence(b.n, config.tau, params, config.channel);
        posterior.update([&](double phi) {
            return std::log(
                std::max(likelihood(b.outcome, phi, b.n, b.control_phase, d, bit_fidelity), 1e-300));
        });
    }
    return posterior;
}

} // namespace qlockin
