#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace lanemerge::orch {

struct ServiceConfig {
  std::uint16_t listen_port = 40990;
  std::string model_path;
  int target_lane = 1;
  double lane_center_x = 0.0;
  double clearance_factor = 0.1;
  std::int64_t staleness_ms = 1000;
  double budget_ms = 30.0;  // planning time target, reported not enforced
};

// key=value lines; '#' starts a comment, blank lines are skipped, unknown
// keys are an error.
ServiceConfig parse_service_config(std::istream& in);
ServiceConfig load_service_config(const std::string& path);

// LANEMERGE_<UPPERCASE KEY> environment variables override file values.
void apply_env_overrides(ServiceConfig& config);

}  // namespace lanemerge::orch
