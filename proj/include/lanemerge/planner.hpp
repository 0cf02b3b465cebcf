#pragma once

#include <stdexcept>
#include <vector>

#include "lanemerge/model_io.hpp"
#include "lanemerge/protocol.hpp"
#include "lanemerge/safety.hpp"

namespace lanemerge::orch {

struct PlannerConfig {
  int target_lane = 1;
  double lane_center_x = 0.0;     // lateral centre of the target lane, metres
  double clearance_factor = safety::kDefaultClearanceFactor;
  int horizon_steps = 30;         // 0.1 s per step
  double step_seconds = 0.1;
};

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Which strategy produced the waypoints.
enum class PlanPath {
  lane_blend,      // target lane empty: drift to the lane centre
  model_track,     // classifier approved and the simulated ride stayed safe
  gap_reposition,  // steer towards the first reachable safe slot
  hold,            // no safe slot inside the horizon: keep speed and heading
};

const char* to_string(PlanPath path);

struct PlanResult {
  wire::Recommendation recommendation;  // recommendation_id left for the caller
  PlanPath path = PlanPath::hold;
};

// Builds a trajectory recommendation for `merging` against the current world
// snapshot. Neighbours are the nearest target-lane vehicles ahead and behind,
// extrapolated at constant speed along the lane. Waypoints with
// merge_flag=true are guaranteed to keep the protective circles separated and
// to stay ahead of the following vehicle at every step.
PlanResult plan_merge(const wire::RoadUser& merging, const std::vector<wire::RoadUser>& snapshot,
                      const ml::ModelBundle& bundle, const PlannerConfig& config = {});

// The per-step predicate behind the merge_flag guarantee.
bool step_is_safe(const safety::ActorState& m, const std::optional<safety::ActorState>& preceding,
                  const std::optional<safety::ActorState>& following, double clearance_factor);

}  // namespace lanemerge::orch
