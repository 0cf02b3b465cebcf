#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lanemerge::traj {

constexpr double kSamplePeriod = 0.1;  // 10 Hz grid
constexpr int kWindowSize = 70;        // 4 s before through 3 s after a lane change
constexpr int kHistorySamples = 40;    // samples strictly before the event inside a window

// Timestamps live on a 0.1 s grid; deciseconds are their exact integer form.
std::int64_t to_deci(double seconds);
double from_deci(std::int64_t deci);

struct TrajectorySample {
  std::string vehicle_id;
  double timestamp = 0.0;     // seconds
  double x = 0.0;             // lateral, metres
  double y = 0.0;             // longitudinal, metres
  int lane_id = 0;
  double speed = 0.0;         // m/s
  double acceleration = 0.0;  // m/s^2
  double length = 0.0;        // metres
  double width = 0.0;         // metres
};

struct VehicleTrack {
  std::string vehicle_id;
  std::vector<TrajectorySample> samples;  // strictly ascending timestamps

  // Exact grid hit, or -1.
  int index_at(std::int64_t deci) const;
  // Sample at a grid point; interior gaps are linearly interpolated, points
  // outside the recorded span are absent.
  std::optional<TrajectorySample> sample_at(std::int64_t deci) const;
};

struct LaneChangeEvent {
  std::string vehicle_id;
  int event_index = 0;  // first sample in the new lane
  int from_lane = 0;
  int to_lane = 0;
  double event_time = 0.0;
};

struct NeighborSamples {
  std::string vehicle_id;
  // One slot per window grid point; a slot is empty where the neighbour's
  // track does not cover that time.
  std::vector<std::optional<TrajectorySample>> samples;
};

struct ScenarioWindow {
  LaneChangeEvent event;
  std::vector<TrajectorySample> m_samples;
  std::optional<NeighborSamples> preceding;
  std::optional<NeighborSamples> following;

  // Index of the sample at event_time (kHistorySamples for pipeline output).
  int event_offset() const;
};

enum class WindowSkip { insufficient_history, insufficient_future, gap_in_track };
const char* to_string(WindowSkip skip);

using WindowResult = std::variant<ScenarioWindow, WindowSkip>;

enum class TrajectoryFormat { ngsim };

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One track per distinct vehicle id, samples sorted ascending by timestamp,
// units converted to metres/seconds. Tracks recorded off the 0.1 s grid are
// resampled onto it by linear interpolation.
std::vector<VehicleTrack> parse_trajectory_file(const std::string& path, TrajectoryFormat format);
std::vector<VehicleTrack> parse_trajectory_stream(std::istream& in, TrajectoryFormat format);

std::vector<LaneChangeEvent> detect_lane_changes(const VehicleTrack& track);

// The 70 samples at event_time - 4.0 s through event_time + 2.9 s, or the
// reason the track cannot supply them.
WindowResult extract_window(const VehicleTrack& track, const LaneChangeEvent& event);

// Fills preceding/following from the other tracks: P is the nearest vehicle
// ahead of M in the target lane at event_time, F the nearest behind.
ScenarioWindow assign_neighbors(const std::vector<VehicleTrack>& all_tracks, ScenarioWindow window);

VehicleTrack resample_to_grid(const VehicleTrack& track);

}  // namespace lanemerge::traj
