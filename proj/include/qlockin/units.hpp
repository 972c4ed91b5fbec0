#pragma once

#include <cmath>
#include <numbers>

namespace qlockin {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wrap an angle to the interval (-pi, pi].
inline double wrap_angle(double a) {
    a = std::remainder(a, kTwoPi);
    return a == -kPi ? kPi : a;
}

/// Smallest signed angular difference a - b, wrapped to (-pi, pi].
inline double angle_diff(double a, double b) { return wrap_angle(a - b); }

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

} // namespace qlockin
