#pragma once

namespace oam4 {

/// Speed of light in mm/ps.
inline constexpr double kSpeedOfLightMmPerPs = 0.299792458;

struct WalkOff {
  double dispersion_ps_per_mm = 0.0;  // group delay mismatch per unit length
  double walkoff_length_mm = 0.0;     // length over which the delay reaches one pulse duration
};

/// D = delta_ng / c and L_gv = pulse_duration / D. Throws ValidationError
/// unless delta_ng > 0 and pulse_duration_ps >= 0.
WalkOff group_velocity_walkoff(double delta_ng, double pulse_duration_ps);

}  // namespace oam4
