#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lanemerge/protocol.hpp"

namespace lanemerge::replay {

struct ScenarioParams {
  std::uint64_t seed = 42;
  std::string name = "three-vehicle-merge";
  double duration_s = 7.0;
  double rate_hz = 10.0;
  std::int64_t base_time_ms = 1600000000000;

  int merge_lane = 2;  // where the merging vehicle starts
  int target_lane = 1;
  double merge_lane_x = 3.5;
  double target_lane_x = 0.0;

  double merging_speed = 13.0;    // m/s, jittered by the seed
  double preceding_speed = 13.5;
  double following_speed = 12.5;
  double merging_y0 = 30.0;
  double preceding_y0 = 58.0;
  double following_y0 = 4.0;

  double merge_start_s = 2.0;  // lateral taper window
  double merge_end_s = 5.0;
};

struct TraceMeta {
  std::string name;
  double rate_hz = 10.0;
  std::size_t message_count = 0;
};

struct ScenarioTrace {
  TraceMeta meta;
  std::vector<wire::RudUpdate> updates;  // time-ordered
};

// Three vehicles at a fixed report rate: one connected vehicle merging from
// the side lane, one perceived vehicle ahead and one behind in the target
// lane. The seed jitters initial speeds and gaps.
ScenarioTrace synth_scenario(const ScenarioParams& params = {});

void write_trace_file(const std::string& path, const ScenarioTrace& trace);
ScenarioTrace read_trace_file(const std::string& path);

}  // namespace lanemerge::replay
