#include "aisolsr/mobility.hpp"

#include <algorithm>
#include <stdexcept>

namespace aisolsr {

Position random_position(Rng& rng, const Area& area) {
  const double x = uniform(rng, 0.0, area.width);
  const double y = uniform(rng, 0.0, area.height);
  return {x, y};
}

MobilityState initial_mobility_state(Rng& rng, const MobilityParams& params) {
  MobilityState s;
  s.current = random_position(rng, params.area);
  s.waypoint = s.current;
  s.phase = MobilityPhase::paused;
  s.pause_remaining = params.pause_time;
  return s;
}

namespace {

void start_leg(MobilityState& s, Rng& rng, const MobilityParams& params) {
  s.waypoint = random_position(rng, params.area);
  s.speed = uniform(rng, params.speed_min, params.speed_max);
  s.phase = MobilityPhase::moving;
  s.pause_remaining = 0.0;
}

}  // namespace

MobilityState advance(MobilityState s, double dt, Rng& rng, const MobilityParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("mobility step must be positive");

  double left = dt;
  // A zero-speed node would never arrive; bound the loop anyway.
  for (int guard = 0; left > 0.0 && guard < 64; ++guard) {
    if (s.phase == MobilityPhase::paused) {
      if (s.pause_remaining > left) {
        s.pause_remaining -= left;
        return s;
      }
      left -= s.pause_remaining;
      start_leg(s, rng, params);
      if (left <= 0.0) return s;
      continue;
    }

    const double remaining = euclidean_distance(s.current, s.waypoint);
    const double reach = s.speed * left;
    if (reach < remaining) {
      const double f = reach / remaining;
      s.current.x += (s.waypoint.x - s.current.x) * f;
      s.current.y += (s.waypoint.y - s.current.y) * f;
      s.current.x = std::clamp(s.current.x, 0.0, params.area.width);
      s.current.y = std::clamp(s.current.y, 0.0, params.area.height);
      return s;
    }
    left -= s.speed > 0.0 ? remaining / s.speed : left;
    s.current = s.waypoint;
    s.phase = MobilityPhase::paused;
    s.pause_remaining = params.pause_time;
  }
  return s;
}

}  // namespace aisolsr
