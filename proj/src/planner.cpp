#include "lanemerge/planner.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "lanemerge/heading.hpp"
#include "lanemerge/labeler.hpp"

namespace lanemerge::orch {

namespace {

constexpr double kDegToRad = M_PI / 180.0;

safety::ActorState actor_from_user(const wire::RoadUser& u) {
  safety::ActorState a;
  a.x = u.x;
  a.y = u.y;
  a.speed = u.speed;
  a.acceleration = u.acceleration;
  a.length = u.length;
  return a;
}

// Constant-velocity extrapolation along the lane from the user's own report
// time to `target_ms + offset_s`.
safety::ActorState extrapolate(const wire::RoadUser& u, std::int64_t target_ms, double offset_s) {
  safety::ActorState a = actor_from_user(u);
  const double dt = static_cast<double>(target_ms - u.timestamp_ms) / 1000.0 + offset_s;
  a.y += a.speed * dt;
  return a;
}

struct Neighbors {
  const wire::RoadUser* preceding = nullptr;
  const wire::RoadUser* following = nullptr;
};

Neighbors find_neighbors(const wire::RoadUser& merging, const std::vector<wire::RoadUser>& snapshot,
                         int target_lane) {
  Neighbors n;
  for (const auto& user : snapshot) {
    if (user.id == merging.id || user.lane_id != target_lane) continue;
    if (user.y > merging.y) {
      if (!n.preceding || user.y < n.preceding->y) n.preceding = &user;
    } else if (user.y < merging.y) {
      if (!n.following || user.y > n.following->y) n.following = &user;
    }
  }
  return n;
}

std::vector<double> features_for(const safety::ActorState& m,
                                 const std::optional<safety::ActorState>& preceding,
                                 const std::optional<safety::ActorState>& following) {
  const auto f = labeler::feature_vector(m, preceding, following);
  return std::vector<double>(f.begin(), f.end());
}

wire::Waypoint make_waypoint(int step, double step_seconds, double x, double y, double speed,
                             double acceleration, double heading) {
  wire::Waypoint w;
  w.t_offset_ms = static_cast<std::int64_t>(std::llround(step * step_seconds * 1000.0));
  w.x = x;
  w.y = y;
  w.speed = speed;
  w.acceleration = acceleration;
  w.heading = normalize_heading(heading);
  return w;
}

// Turns a positional path into waypoints, deriving speed, acceleration and
// heading from consecutive displacements.
std::vector<wire::Waypoint> waypoints_from_path(const std::vector<std::pair<double, double>>& path,
                                                const wire::RoadUser& merging,
                                                const PlannerConfig& config) {
  std::vector<wire::Waypoint> out;
  double prev_x = merging.x;
  double prev_y = merging.y;
  double prev_speed = merging.speed;
  double prev_heading = merging.heading;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double dx = path[i].first - prev_x;
    const double dy = path[i].second - prev_y;
    const double dist = std::hypot(dx, dy);
    const double speed = dist / config.step_seconds;
    const double heading = dist > 1e-9 ? bearing_degrees(dx, dy) : prev_heading;
    const double accel = (speed - prev_speed) / config.step_seconds;
    out.push_back(make_waypoint(static_cast<int>(i) + 1, config.step_seconds, path[i].first,
                                path[i].second, speed, accel, heading));
    prev_x = path[i].first;
    prev_y = path[i].second;
    prev_speed = speed;
    prev_heading = heading;
  }
  return out;
}

}  // namespace

const char* to_string(PlanPath path) {
  switch (path) {
    case PlanPath::lane_blend: return "lane_blend";
    case PlanPath::model_track: return "model_track";
    case PlanPath::gap_reposition: return "gap_reposition";
    case PlanPath::hold: return "hold";
  }
  return "unknown";
}

bool step_is_safe(const safety::ActorState& m, const std::optional<safety::ActorState>& preceding,
                  const std::optional<safety::ActorState>& following, double clearance_factor) {
  if (preceding && !safety::circle_safe(m, *preceding, clearance_factor)) return false;
  if (following) {
    if (!safety::circle_safe(m, *following, clearance_factor)) return false;
    const double clearance = clearance_factor * safety::speed_kmh(m.speed);
    if (safety::front_edge(*following) + clearance > safety::rear_edge(m)) return false;
  }
  return true;
}

PlanResult plan_merge(const wire::RoadUser& merging, const std::vector<wire::RoadUser>& snapshot,
                      const ml::ModelBundle& bundle, const PlannerConfig& config) {
  if (!merging.merging) throw PlanError("vehicle is not requesting a merge");
  if (config.horizon_steps <= 0) throw PlanError("planning horizon must be positive");
  if (config.step_seconds <= 0.0) throw PlanError("step duration must be positive");
  if (!bundle.merge || !bundle.accel || !bundle.heading) throw PlanError("incomplete model bundle");

  PlanResult result;
  wire::Recommendation& rec = result.recommendation;
  rec.vehicle_id = merging.id;
  rec.rud_timestamp_ms = merging.timestamp_ms;

  const Neighbors neighbors = find_neighbors(merging, snapshot, config.target_lane);
  const safety::ActorState m0 = actor_from_user(merging);

  auto neighbor_at = [&](const wire::RoadUser* user, int step) -> std::optional<safety::ActorState> {
    if (!user) return std::nullopt;
    return extrapolate(*user, merging.timestamp_ms, step * config.step_seconds);
  };

  const bool classifier_says_merge =
      bundle.merge->predict(features_for(m0, neighbor_at(neighbors.preceding, 0),
                                         neighbor_at(neighbors.following, 0))) >= 0.5;

  // Empty target lane: drift to the lane centre, longitudinal motion driven
  // by the acceleration model.
  if (!neighbors.preceding && !neighbors.following) {
    result.path = PlanPath::lane_blend;
    rec.merge_flag = classifier_says_merge;
    safety::ActorState state = m0;
    for (int step = 1; step <= config.horizon_steps; ++step) {
      const double accel = bundle.accel->predict(features_for(state, std::nullopt, std::nullopt));
      state.speed = std::max(0.0, state.speed + accel * config.step_seconds);
      state.acceleration = accel;
      const double frac = static_cast<double>(step) / config.horizon_steps;
      const double x = m0.x + frac * (config.lane_center_x - m0.x);
      const double prev_y = state.y;
      state.y += state.speed * config.step_seconds;
      const double heading =
          std::hypot(x - state.x, state.y - prev_y) > 1e-9
              ? bearing_degrees(x - state.x, state.y - prev_y)
              : merging.heading;
      state.x = x;
      rec.waypoints.push_back(make_waypoint(step, config.step_seconds, state.x, state.y,
                                            state.speed, accel, heading));
    }
    return result;
  }

  // Model-driven ride, kept only if every simulated step stays safe.
  if (classifier_says_merge) {
    std::vector<wire::Waypoint> waypoints;
    safety::ActorState state = m0;
    double heading = merging.heading;
    bool safe = true;
    for (int step = 1; step <= config.horizon_steps; ++step) {
      const auto p_now = neighbor_at(neighbors.preceding, step - 1);
      const auto f_now = neighbor_at(neighbors.following, step - 1);
      const auto features = features_for(state, p_now, f_now);
      const double accel = bundle.accel->predict(features);
      heading = normalize_heading(bundle.heading->predict(features));

      state.speed = std::max(0.0, state.speed + accel * config.step_seconds);
      state.acceleration = accel;
      const double dist = state.speed * config.step_seconds;
      state.x += dist * std::cos(heading * kDegToRad);
      state.y += dist * std::sin(heading * kDegToRad);

      if (!step_is_safe(state, neighbor_at(neighbors.preceding, step),
                        neighbor_at(neighbors.following, step), config.clearance_factor)) {
        safe = false;
        break;
      }
      waypoints.push_back(make_waypoint(step, config.step_seconds, state.x, state.y, state.speed,
                                        accel, heading));
    }
    if (safe) {
      result.path = PlanPath::model_track;
      rec.merge_flag = true;
      rec.waypoints = std::move(waypoints);
      return result;
    }
  }

  // The merge is off: aim for the first step whose slot between the
  // neighbours is safe to occupy, then ride along with it.
  rec.merge_flag = false;

  auto slot_at = [&](int step) -> std::optional<std::pair<double, double>> {
    const auto p = neighbor_at(neighbors.preceding, step);
    const auto f = neighbor_at(neighbors.following, step);
    const double clearance = config.clearance_factor * safety::speed_kmh(m0.speed);
    double y;
    if (p && f) {
      const double lo = safety::front_edge(*f) + clearance + m0.length / 2.0;
      const double hi = safety::rear_edge(*p) - clearance - m0.length / 2.0;
      if (lo > hi) return std::nullopt;  // the gap is too short to hold us
      y = std::clamp((safety::rear_edge(*p) + safety::front_edge(*f)) / 2.0, lo, hi);
    } else if (p) {
      y = safety::rear_edge(*p) - clearance - m0.length / 2.0;
    } else {
      y = safety::front_edge(*f) + clearance + m0.length / 2.0;
    }

    safety::ActorState placed = m0;
    placed.x = config.lane_center_x;
    placed.y = y;
    if (!step_is_safe(placed, p, f, config.clearance_factor)) return std::nullopt;
    return std::make_pair(config.lane_center_x, y);
  };

  int safe_step = -1;
  for (int step = 1; step <= config.horizon_steps; ++step) {
    if (slot_at(step)) {
      safe_step = step;
      break;
    }
  }

  if (safe_step < 0) {
    result.path = PlanPath::hold;
    const double vx = m0.speed * std::cos(merging.heading * kDegToRad);
    const double vy = m0.speed * std::sin(merging.heading * kDegToRad);
    for (int step = 1; step <= config.horizon_steps; ++step) {
      const double t = step * config.step_seconds;
      rec.waypoints.push_back(make_waypoint(step, config.step_seconds, m0.x + vx * t, m0.y + vy * t,
                                            m0.speed, 0.0, merging.heading));
    }
    return result;
  }

  result.path = PlanPath::gap_reposition;
  std::vector<std::pair<double, double>> path;
  const auto target = *slot_at(safe_step);
  for (int step = 1; step <= config.horizon_steps; ++step) {
    if (step <= safe_step) {
      const double frac = static_cast<double>(step) / safe_step;
      path.emplace_back(m0.x + frac * (target.first - m0.x), m0.y + frac * (target.second - m0.y));
    } else if (const auto slot = slot_at(step)) {
      path.emplace_back(slot->first, slot->second);
    } else {
      path.emplace_back(path.back());  // the gap collapsed: sit where we are
    }
  }
  rec.waypoints = waypoints_from_path(path, merging, config);
  return result;
}

}  // namespace lanemerge::orch
