#pragma once

#include "aisolsr/rng.hpp"
#include "aisolsr/types.hpp"

namespace aisolsr {

struct Area {
  double width = 1000.0;
  double height = 1000.0;

  bool contains(Position p) const { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
};

/// Random-waypoint parameters.
struct MobilityParams {
  double speed_min = 1.0;   // m/s
  double speed_max = 10.0;  // m/s
  double pause_time = 10.0; // s
  Area area;
};

enum class MobilityPhase { moving, paused };

struct MobilityState {
  Position current;
  Position waypoint;
  double speed = 0.0;
  MobilityPhase phase = MobilityPhase::paused;
  double pause_remaining = 0.0;
};

Position random_position(Rng& rng, const Area& area);

/// Node placed uniformly in the area, paused for one pause period before its
/// first leg (the usual random-waypoint warm start).
MobilityState initial_mobility_state(Rng& rng, const MobilityParams& params);

/// Advances one node by `dt` seconds. Leftover time after an arrival is spent
/// pausing; when a pause expires a fresh waypoint and speed are drawn from
/// `rng` and motion resumes within the same step. Requires dt > 0.
MobilityState advance(MobilityState state, double dt, Rng& rng, const MobilityParams& params);

}  // namespace aisolsr
