#pragma once

#include <optional>

namespace lanemerge::safety {

inline constexpr double kDefaultClearanceFactor = 0.1;

// Minimal kinematic state used by the safety rules. Positions are the
// vehicle's centre in metres, speed is in m/s, length in metres.
struct ActorState {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double acceleration = 0.0;
  double length = 0.0;
};

double speed_kmh(double speed_ms);

// Clearance radius around the merging vehicle, in metres. Grows with speed so
// faster vehicles demand a wider berth.
double merge_radius(const ActorState& merging, double clearance_factor = kDefaultClearanceFactor);

// Two-circle separation test: the merging vehicle keeps a speed-scaled radius,
// the other vehicle a radius equal to its own length. Touching circles count
// as a conflict.
bool circle_safe(const ActorState& merging, const ActorState& other,
                 double clearance_factor = kDefaultClearanceFactor);

// Longitudinal gap test against the target-lane pair. Either neighbour may be
// absent, in which case its half of the condition holds vacuously.
bool gap_safe(const ActorState& merging, const std::optional<ActorState>& preceding,
              const std::optional<ActorState>& following,
              double clearance_factor = kDefaultClearanceFactor);

double front_edge(const ActorState& v);
double rear_edge(const ActorState& v);

}  // namespace lanemerge::safety
