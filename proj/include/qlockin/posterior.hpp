#pragma once

#include <cmath>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "qlockin/units.hpp"

namespace qlockin {

/// Discretized posterior over the base (n = 1) per-cell quantum phase on
/// (-pi, pi]. Log-likelihoods accumulate per grid point; a single
/// exponentiation happens at normalization, so hundreds of bit updates
/// cannot underflow.
class PosteriorGrid {
  public:
    explicit PosteriorGrid(int size = 4096) : size_(size), log_weight_(static_cast<std::size_t>(size), 0.0) {
        if (size < 2) throw std::invalid_argument("PosteriorGrid: size must be >= 2");
    }

    int size() const { return size_; }
    double step() const { return kTwoPi / size_; }

    /// Grid point i, i = 0..size-1; covers (-pi, pi] with phi(size-1) = pi
    /// and 0 on the grid for even sizes.
    double phi(int i) const { return -kPi + (i + 1) * step(); }

    std::span<const double> log_weights() const { return log_weight_; }
    double& log_weight(int i) { return log_weight_[static_cast<std::size_t>(i)]; }

    /// Accumulate log f(phi_i) for every grid point.
    template <class F>
    void update(F&& log_likelihood_of_phi) {
        for (int i = 0; i < size_; ++i)
            log_weight_[static_cast<std::size_t>(i)] += log_likelihood_of_phi(phi(i));
    }

    /// Normalized density p_i with sum p_i * step == 1.
    std::vector<double> normalized() const {
        double max_lw = log_weight_[0];
        for (double lw : log_weight_)
            if (lw > max_lw) max_lw = lw;
        std::vector<double> p(log_weight_.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = std::exp(log_weight_[i] - max_lw);
            sum += p[i];
        }
        const double scale = 1.0 / (sum * step());
        for (auto& v : p) v *= scale;
        return p;
    }

  private:
    int size_;
    std::vector<double> log_weight_;
};

struct MleEstimate {
    double phi = 0.0;
    /// Set when the maximum is not unique beyond adjacent grid points
    /// (symmetric bimodal or flat posterior).
    bool degenerate = false;
};

/// Grid argmax of the posterior. Ties within 1e-12 in log weight are broken
/// toward the smallest |phi| (positive side on an exact +/- tie); a tie set
/// extending beyond adjacent grid points raises the degeneracy flag. A flat
/// posterior returns 0 with the flag set.
inline MleEstimate mle(const PosteriorGrid& posterior) {
    const auto lw = posterior.log_weights();
    double max_lw = lw[0];
    for (double v : lw)
        if (v > max_lw) max_lw = v;

    const double tol = 1e-12 * std::max(1.0, std::abs(max_lw));
    MleEstimate est;
    int best = -1;
    int first_tie = -1, last_tie = -1;
    int tie_count = 0;
    for (int i = 0; i < posterior.size(); ++i) {
        if (lw[static_cast<std::size_t>(i)] < max_lw - tol) continue;
        ++tie_count;
        if (first_tie < 0) first_tie = i;
        last_tie = i;
        const double p = posterior.phi(i);
        if (best < 0) {
            best = i;
            continue;
        }
        const double pb = posterior.phi(best);
        if (std::abs(p) < std::abs(pb) - 1e-18 ||
            (std::abs(std::abs(p) - std::abs(pb)) <= 1e-18 && p > pb))
            best = i;
    }
    est.phi = posterior.phi(best);
    const int span = last_tie - first_tie + 1;
    est.degenerate = tie_count < span || span > 2;
    if (tie_count == posterior.size()) est.phi = 0.0;
    return est;
}

} // namespace qlockin
