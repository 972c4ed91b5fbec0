#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "qlockin/rng.hpp"
#include "qlockin/sensor.hpp"
#include "qlockin/units.hpp"

namespace qlockin {

/// How a single bit measurement u = +/- is produced from the signal S.
///
/// DirectBit draws the ideal outcome with P(+) = (1+S)/2 and flips it with
/// probability 1 - fidelity. PhotonCount draws the ideal state, then the
/// total photon count over R repetitions (Poisson with state-dependent
/// mean), and thresholds the sum; it reproduces the repeated-readout
/// histogram picture and lets R-versus-fidelity tradeoffs be studied.
struct MeasurementModel {
    enum class Kind { DirectBit, PhotonCount };

    Kind kind = Kind::DirectBit;
    double fidelity = 0.97;   // DirectBit
    double n0_mean = 0.0;     // PhotonCount: photons per repetition in |0>
    double n1_mean = 0.0;     // PhotonCount: photons per repetition in |-1>
    long long R_reps = 15000;
    long long threshold = 0;  // PhotonCount: total-count decision boundary

    static MeasurementModel direct_bit(double fidelity, long long R_reps = 15000) {
        MeasurementModel m;
        m.kind = Kind::DirectBit;
        m.fidelity = fidelity;
        m.R_reps = R_reps;
        m.validate();
        return m;
    }

    static MeasurementModel photon_count(double n0_mean, double n1_mean, long long R_reps,
                                         long long threshold) {
        MeasurementModel m;
        m.kind = Kind::PhotonCount;
        m.n0_mean = n0_mean;
        m.n1_mean = n1_mean;
        m.R_reps = R_reps;
        m.threshold = threshold;
        m.validate();
        return m;
    }

    void validate() const {
        if (R_reps < 1) throw std::invalid_argument("MeasurementModel: R_reps must be >= 1");
        if (kind == Kind::DirectBit) {
            if (fidelity <= 0.5 || fidelity > 1.0)
                throw std::invalid_argument("MeasurementModel: fidelity must be in (0.5, 1]");
        } else {
            if (n1_mean <= 0.0 || n0_mean <= n1_mean)
                throw std::invalid_argument("MeasurementModel: need n0_mean > n1_mean > 0");
            const double lam0 = static_cast<double>(R_reps) * n0_mean;
            const double lam1 = static_cast<double>(R_reps) * n1_mean;
            if (static_cast<double>(threshold) <= lam1 || static_cast<double>(threshold) >= lam0)
                throw std::invalid_argument(
                    "MeasurementModel: threshold must lie between R*n1_mean and R*n0_mean");
        }
    }

    /// Effective bit fidelity entering the Bayesian likelihood. Exact for
    /// DirectBit; for PhotonCount the symmetrized discrimination fidelity
    /// from exact Poisson tails.
    double bit_fidelity() const;
};

/// P(N <= k) for N ~ Poisson(lambda), by direct pmf summation.
inline double poisson_cdf(long long k, double lambda) {
    if (k < 0) return 0.0;
    double p = std::exp(-lambda);
    double cdf = p;
    for (long long i = 1; i <= k; ++i) {
        p *= lambda / static_cast<double>(i);
        cdf += p;
    }
    return cdf > 1.0 ? 1.0 : cdf;
}

/// Exact discrimination fidelity of the photon model:
/// 1 - [P(N0 < c) + P(N1 >= c)]/2 for N0 ~ Poisson(R*n0), N1 ~ Poisson(R*n1).
inline double photon_fidelity_exact(double lambda0, double lambda1, long long threshold) {
    const double err0 = poisson_cdf(threshold - 1, lambda0);
    const double err1 = 1.0 - poisson_cdf(threshold - 1, lambda1);
    return 1.0 - 0.5 * (err0 + err1);
}

inline double MeasurementModel::bit_fidelity() const {
    if (kind == Kind::DirectBit) return fidelity;
    const double r = static_cast<double>(R_reps);
    return photon_fidelity_exact(r * n0_mean, r * n1_mean, threshold);
}

/// Draw one measurement bit from the signal S in [-1, 1]. Returns +1 for
/// the bright state |0> and -1 for |-1>.
inline int measure_bit(double S, const MeasurementModel& model, Rng& rng) {
    if (std::abs(S) > 1.0) throw std::domain_error("measure_bit: |S| must be <= 1");
    const bool ideal_plus = rng.bernoulli(0.5 * (1.0 + S));
    if (model.kind == MeasurementModel::Kind::DirectBit) {
        const bool flip = rng.bernoulli(1.0 - model.fidelity);
        return (ideal_plus != flip) ? +1 : -1;
    }
    const double mean = static_cast<double>(model.R_reps) * (ideal_plus ? model.n0_mean : model.n1_mean);
    const long long photons = rng.poisson(mean);
    return photons >= model.threshold ? +1 : -1;
}

/// Likelihood P(u | phi) of a bit u given the grid phase phi at level n:
/// f*(u*S+1)/2 + (1-f)*(-u*S+1)/2 with S = D*cos(n*phi - Phi). At f = 1
/// this is the ideal (+/-S+1)/2 outcome probability.
inline double likelihood(int u, double phi, int n, double Phi, double D, double f) {
    if (u != +1 && u != -1) throw std::invalid_argument("likelihood: u must be +1 or -1");
    if (D <= 0.0 || D > 1.0) throw std::invalid_argument("likelihood: D must be in (0, 1]");
    if (f <= 0.5 || f > 1.0) throw std::invalid_argument("likelihood: f must be in (0.5, 1]");
    const double S = D * std::cos(n * phi - Phi);
    const double us = u > 0 ? S : -S;
    return f * 0.5 * (us + 1.0) + (1.0 - f) * 0.5 * (1.0 - us);
}

struct FidelityEstimate {
    double monte_carlo;  // empirical discrimination fidelity
    double analytic;     // normal-approximation estimate
};

/// Monte Carlo discrimination fidelity of a PhotonCount model (pure |0>
/// versus pure |-1> inputs), plus the Gaussian-tail analytic estimate.
inline FidelityEstimate calibrate_fidelity(const MeasurementModel& model, Rng& rng,
                                           int trials_per_state = 20000) {
    if (model.kind != MeasurementModel::Kind::PhotonCount)
        throw std::invalid_argument("calibrate_fidelity: requires a PhotonCount model");
    if (model.n0_mean == model.n1_mean)
        throw std::invalid_argument("calibrate_fidelity: degenerate photon means");
    if (trials_per_state < 10000)
        throw std::invalid_argument("calibrate_fidelity: need >= 10^4 trials per state");

    const double r = static_cast<double>(model.R_reps);
    long long correct0 = 0, correct1 = 0;
    for (int i = 0; i < trials_per_state; ++i) {
        if (rng.poisson(r * model.n0_mean) >= model.threshold) ++correct0;
        if (rng.poisson(r * model.n1_mean) < model.threshold) ++correct1;
    }
    const double mc = 0.5 * (correct0 + correct1) / static_cast<double>(trials_per_state);

    const double lam0 = r * model.n0_mean;
    const double lam1 = r * model.n1_mean;
    const double c = static_cast<double>(model.threshold);
    const auto phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double err0 = phi((c - lam0) / std::sqrt(lam0));
    const double err1 = 1.0 - phi((c - lam1) / std::sqrt(lam1));
    return {mc, 1.0 - 0.5 * (err0 + err1)};
}

/// Solve for photon means such that the model hits a target discrimination
/// fidelity at the given repetition count, with the two per-state error
/// rates equal (so the model is statistically a symmetric bit-flip channel)
/// and the count contrast (n0-n1)/(n0+n1) as close as possible to
/// `contrast`. The paper reports only the resulting fidelity, so these are
/// calibration targets rather than measured rates.
inline MeasurementModel tune_photon_model(double target_fidelity, long long R_reps,
                                          double contrast = 0.3) {
    if (target_fidelity <= 0.5 || target_fidelity >= 1.0)
        throw std::invalid_argument("tune_photon_model: target fidelity must be in (0.5, 1)");
    if (contrast <= 0.0 || contrast >= 1.0)
        throw std::invalid_argument("tune_photon_model: contrast must be in (0, 1)");

    const double err = 1.0 - target_fidelity;
    // Normal-approximation z for the one-sided tail err.
    double z = 1.0, lo = 0.0, hi = 10.0;
    const auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
    for (int i = 0; i < 80; ++i) {
        z = 0.5 * (lo + hi);
        (phi(-z) > err ? lo : hi) = z;
    }

    // Pick the integer threshold whose equal-error means give the wanted
    // contrast: lam0/lam1 = ((z + sqrt(z^2+4c))/(−z + sqrt(z^2+4c)))^2.
    long long best_c = 1;
    double best_dev = 1e300;
    for (long long c = 1; c <= 200000; ++c) {
        const double root = std::sqrt(z * z + 4.0 * static_cast<double>(c));
        const double s0 = 0.5 * (z + root), s1 = 0.5 * (root - z);
        const double lam0 = s0 * s0, lam1 = s1 * s1;
        const double con = (lam0 - lam1) / (lam0 + lam1);
        const double dev = std::abs(con - contrast);
        if (dev < best_dev) {
            best_dev = dev;
            best_c = c;
        }
        if (con < contrast && c > 4) break; // contrast decreases with c
    }

    // Refine each mean with the exact Poisson tails at the chosen threshold.
    const auto solve = [&](bool upper) {
        double a = 1e-3, b = 16.0 * static_cast<double>(best_c) + 16.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (a + b);
            const double e = upper ? poisson_cdf(best_c - 1, mid)          // P(N0 < c)
                                   : 1.0 - poisson_cdf(best_c - 1, mid);   // P(N1 >= c)
            if (upper) {
                (e > err ? a : b) = mid; // err falls as lam0 grows
            } else {
                (e < err ? a : b) = mid; // err grows as lam1 grows
            }
        }
        return 0.5 * (a + b);
    };
    const double lam0 = solve(true);
    const double lam1 = solve(false);
    const double r = static_cast<double>(R_reps);
    return MeasurementModel::photon_count(lam0 / r, lam1 / r, R_reps, best_c);
}

/// Default photon-count model matching the nominal survey numbers:
/// fidelity target from `params.readout_fidelity` at params.R_reps with
/// contrast = params.visibility.
inline MeasurementModel default_photon_model(const SensorParams& params) {
    return tune_photon_model(params.readout_fidelity, params.R_reps, params.visibility);
}

} // namespace qlockin
