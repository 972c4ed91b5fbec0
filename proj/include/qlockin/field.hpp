#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qlockin/units.hpp"

namespace qlockin {

/// One cosine component of the target field: b * cos(2*pi*f*t - theta).
struct Tone {
    double amplitude;  // tesla, >= 0
    double frequency;  // hertz, > 0
    double phase;      // radians, stored wrapped to (-pi, pi]
};

/// Piecewise-constant phase override starting at `start`.
struct PhaseStep {
    double start;  // seconds
    double phase;  // radians
};

/// AC magnetic field along the sensing axis: a superposition of cosine
/// tones, optionally with a piecewise-constant schedule that overrides the
/// classical phase of every tone from each breakpoint onward.
class ACField {
  public:
    explicit ACField(std::vector<Tone> tones) : tones_(std::move(tones)) {
        if (tones_.empty()) throw std::invalid_argument("ACField: at least one tone required");
        for (auto& t : tones_) {
            if (t.amplitude < 0.0) throw std::invalid_argument("ACField: tone amplitude must be >= 0");
            if (t.frequency <= 0.0) throw std::invalid_argument("ACField: tone frequency must be > 0");
            t.phase = wrap_angle(t.phase);
        }
    }

    static ACField single_tone(double amplitude, double frequency, double phase = 0.0) {
        return ACField({Tone{amplitude, frequency, phase}});
    }

    /// Two equal-amplitude tones, the second detuned by df (SI Fig. style
    /// two-signal field b*[cos(2*pi*f0*t) + cos(2*pi*(f0+df)*t)]).
    static ACField two_tone(double amplitude, double f0, double df) {
        return ACField({Tone{amplitude, f0, 0.0}, Tone{amplitude, f0 + df, 0.0}});
    }

    void set_phase_schedule(std::vector<PhaseStep> schedule) {
        for (auto& s : schedule) {
            if (s.start < 0.0) throw std::invalid_argument("ACField: schedule start must be >= 0");
            s.phase = wrap_angle(s.phase);
        }
        if (!std::is_sorted(schedule.begin(), schedule.end(),
                            [](const PhaseStep& a, const PhaseStep& b) { return a.start < b.start; }))
            throw std::invalid_argument("ACField: phase schedule must be sorted by start time");
        schedule_ = std::move(schedule);
    }

    const std::vector<Tone>& tones() const { return tones_; }
    const std::vector<PhaseStep>& phase_schedule() const { return schedule_; }
    bool has_phase_schedule() const { return !schedule_.empty(); }

    /// Effective phase of a tone at time t (schedule override if active).
    double phase_at(double t, const Tone& tone) const {
        double phi = tone.phase;
        for (const auto& s : schedule_) {
            if (s.start <= t) phi = s.phase;
            else break;
        }
        return phi;
    }

    /// bz(t) = sum over tones of amplitude * cos(2*pi*f*t - theta(t)).
    double value(double t) const {
        double b = 0.0;
        for (const auto& tone : tones_)
            b += tone.amplitude * std::cos(kTwoPi * tone.frequency * t - phase_at(t, tone));
        return b;
    }

  private:
    std::vector<Tone> tones_;
    std::vector<PhaseStep> schedule_;
};

} // namespace qlockin
