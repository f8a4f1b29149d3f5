#include "oam4/crystal.hpp"

#include "oam4/error.hpp"

namespace oam4 {

WalkOff group_velocity_walkoff(double delta_ng, double pulse_duration_ps) {
  if (!(delta_ng > 0.0)) throw ValidationError("group index difference must be positive");
  if (!(pulse_duration_ps >= 0.0)) throw ValidationError("pulse duration must be non-negative");
  const double d = delta_ng / kSpeedOfLightMmPerPs;
  return {d, pulse_duration_ps / d};
}

}  // namespace oam4
