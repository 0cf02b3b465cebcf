#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lanemerge/scenario.hpp"

namespace lanemerge::replay {

struct ReplayOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  double speed_factor = 1.0;  // trace pacing multiplier; 0 sends flat out
  double budget_ms = 30.0;    // planning budget the report grades against
  double response_timeout_s = 5.0;
  std::string client_name = "replay-harness";
};

struct LatencyStats {
  std::size_t count = 0;
  double p50 = 0.0;
  double p95 = 0.0;
  double p99 = 0.0;
  double max = 0.0;
};

struct BitrateCheck {
  double mean_message_bytes = 0.0;        // encoded rud_update plus framing
  double bits_per_second_per_vehicle = 0.0;
  double low_rate_bps = 320000.0;    // narrow V2X control channel
  double high_rate_bps = 4700000.0;  // broadband V2X channel
  bool fits_low_rate = false;
  bool fits_high_rate = false;
};

struct ReplayResult {
  std::size_t updates_sent = 0;
  std::size_t recommendations_received = 0;
  std::size_t errors_received = 0;
  std::size_t unmatched_recommendations = 0;  // no send time for their echo

  // Round-trip from sending a merging vehicle's update to its recommendation
  // arriving, measured at the client. Includes loopback transport, which the
  // planning budget excludes; per_message_processing captures the service's
  // own share.
  LatencyStats round_trip;
  LatencyStats processing;
  std::vector<double> round_trip_samples_ms;
  std::vector<double> processing_samples_ms;
  // Aligned with `recommendations`; negative when the echo matched no send.
  std::vector<double> round_trip_by_recommendation_ms;
  double budget_ms = 30.0;
  bool processing_within_budget = false;  // p99 of processing under budget

  BitrateCheck bitrate;
  std::vector<wire::Recommendation> recommendations;
};

// Nearest-rank percentile; pct in (0, 100].
double percentile(std::vector<double> samples, double pct);

// Computes the analytic channel-load figures for a trace without any network
// involved.
BitrateCheck bitrate_check(const ScenarioTrace& trace);

// Connects to the orchestrator, subscribes, then feeds the trace at its
// recorded pace (scaled by speed_factor) while collecting recommendations.
ReplayResult replay(const ScenarioTrace& trace, const ReplayOptions& options);

struct Violation {
  std::size_t recommendation_index = 0;
  std::size_t waypoint_index = 0;
  std::string reason;
};

// Re-derives the world from the trace and re-checks every merge_flag=true
// waypoint against the geometric safety rules, independently of the planner.
std::vector<Violation> oracle_check(const ScenarioTrace& trace,
                                    const std::vector<wire::Recommendation>& recommendations,
                                    int target_lane, double clearance_factor);

void write_latency_csv(std::ostream& out, const ReplayResult& result);
std::string summarize(const ReplayResult& result);

}  // namespace lanemerge::replay
