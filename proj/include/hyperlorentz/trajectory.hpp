#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "hyperlorentz/errors.hpp"
#include "hyperlorentz/hypgeo.hpp"

namespace hyperlorentz {

/// A direction change at time `time`. Flight events carry obstacle_index = -1.
struct CollisionEvent {
  double time;
  Point impact_point;
  Direction pre_dir;
  Direction post_dir;
  double deflection;  // post_dir = rotate_direction(pre_dir, deflection), in [0, 2pi)
  int obstacle_index;
};

/// Piecewise-geodesic path on [0, horizon]; direction is right-continuous at events.
struct Trajectory {
  State initial;
  double horizon;
  std::vector<CollisionEvent> events;
  std::size_t recollisions = 0;  // events on an obstacle that was already hit

  /// State at the start of the segment that contains time t.
  State segment_start(std::size_t segment) const {
    if (segment == 0) return initial;
    const CollisionEvent& e = events[segment - 1];
    return State{e.impact_point, e.post_dir};
  }
  double segment_time(std::size_t segment) const { return segment == 0 ? 0.0 : events[segment - 1].time; }
};

/// State at time t: flow from the last event at or before t.
inline State position_at(const Trajectory& traj, double t) {
  if (!(t >= 0.0) || !(t <= traj.horizon)) throw contract_error("position_at: time outside [0, horizon]");
  const auto it = std::upper_bound(traj.events.begin(), traj.events.end(), t,
                                   [](double v, const CollisionEvent& e) { return v < e.time; });
  const auto segment = static_cast<std::size_t>(it - traj.events.begin());
  return flow_state(traj.segment_start(segment), t - traj.segment_time(segment));
}

/// Final state at the horizon.
inline State end_state(const Trajectory& traj) { return position_at(traj, traj.horizon); }

}  // namespace hyperlorentz
