#include "lanemerge/safety.hpp"

#include <cmath>

namespace lanemerge::safety {

double speed_kmh(double speed_ms) { return speed_ms * 3.6; }

double merge_radius(const ActorState& merging, double clearance_factor) {
  return clearance_factor * speed_kmh(merging.speed);
}

bool circle_safe(const ActorState& merging, const ActorState& other, double clearance_factor) {
  const double dx = merging.x - other.x;
  const double dy = merging.y - other.y;
  const double dist = std::hypot(dx, dy);
  return dist > merge_radius(merging, clearance_factor) + other.length;
}

bool gap_safe(const ActorState& merging, const std::optional<ActorState>& preceding,
              const std::optional<ActorState>& following, double clearance_factor) {
  const double clearance = clearance_factor * speed_kmh(merging.speed);
  if (preceding && front_edge(merging) + clearance > rear_edge(*preceding)) return false;
  if (following && front_edge(*following) + clearance > rear_edge(merging)) return false;
  return true;
}

double front_edge(const ActorState& v) { return v.y + v.length / 2.0; }
double rear_edge(const ActorState& v) { return v.y - v.length / 2.0; }

}  // namespace lanemerge::safety
