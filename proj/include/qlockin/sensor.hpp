#pragma once

#include <stdexcept>

#include "qlockin/units.hpp"

namespace qlockin {

/// Physical constants and noise parameters of the spin sensor.
///
/// Defaults follow the experimental working point: gamma_e = 2*pi*27.99 GHz/T,
/// gamma_n = 2*pi*10.705 MHz/T (13C bath), B0 = 470 G, V = 0.3, readout
/// fidelity 0.97 at R = 15000 repetitions, measurement dead time 2 us. The
/// coherence envelope is exp(-(T/(T2*m^s))^alpha) with sample-dependent
/// exponents; T2 itself is sample dependent and defaults to 150 us.
struct SensorParams {
    double gamma_e = kTwoPi * 27.99e9;   // rad s^-1 T^-1
    double gamma_n = kTwoPi * 10.705e6;  // rad s^-1 T^-1
    double B0 = 0.047;                   // tesla
    double T2 = 150e-6;                  // seconds, Hahn-echo
    double s_exp = 0.5;                  // coherence scaling T2^(m) = T2 * m^s
    double alpha_exp = 3.0;              // decay exponent
    double visibility = 0.3;             // fringe visibility V
    double collection_factor = 1.0;      // xi, photon collection factor
    double readout_fidelity = 0.97;      // bit discrimination fidelity f
    long long R_reps = 15000;            // repetitions per bit measurement
    double t_M = 2e-6;                   // seconds, measurement dead time

    void validate() const {
        if (gamma_e <= 0.0) throw std::invalid_argument("SensorParams: gamma_e must be > 0");
        if (gamma_n <= 0.0) throw std::invalid_argument("SensorParams: gamma_n must be > 0");
        if (B0 <= 0.0) throw std::invalid_argument("SensorParams: B0 must be > 0");
        if (T2 <= 0.0) throw std::invalid_argument("SensorParams: T2 must be > 0");
        if (s_exp <= 0.0) throw std::invalid_argument("SensorParams: s_exp must be > 0");
        if (alpha_exp <= 0.0) throw std::invalid_argument("SensorParams: alpha_exp must be > 0");
        if (visibility <= 0.0 || visibility > 1.0)
            throw std::invalid_argument("SensorParams: visibility must be in (0, 1]");
        if (collection_factor <= 0.0)
            throw std::invalid_argument("SensorParams: collection_factor must be > 0");
        if (readout_fidelity <= 0.5 || readout_fidelity > 1.0)
            throw std::invalid_argument("SensorParams: readout_fidelity must be in (0.5, 1]");
        if (R_reps < 1) throw std::invalid_argument("SensorParams: R_reps must be >= 1");
        if (t_M <= 0.0) throw std::invalid_argument("SensorParams: t_M must be > 0");
    }
};

} // namespace qlockin
