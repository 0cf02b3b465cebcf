#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace lanemerge::wire {

inline constexpr int kProtocolVersion = 1;

// One road user as described over the wire. Positions are metres in the road
// frame (x lateral, y longitudinal), speed m/s, heading degrees
// counter-clockwise from +x.
struct RoadUser {
  std::string id;
  std::int64_t timestamp_ms = 0;
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double acceleration = 0.0;
  double heading = 90.0;
  int lane_id = 0;
  double length = 0.0;
  double width = 0.0;
  bool connected = false;
  bool merging = false;  // asks the service for a merge recommendation

  bool operator==(const RoadUser&) const = default;
};

struct RudUpdate {
  RoadUser user;
  bool operator==(const RudUpdate&) const = default;
};

struct Subscribe {
  std::string client;
  bool operator==(const Subscribe&) const = default;
};

struct Waypoint {
  std::int64_t t_offset_ms = 0;  // relative to the triggering update
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
  double acceleration = 0.0;
  double heading = 90.0;

  bool operator==(const Waypoint&) const = default;
};

struct Recommendation {
  std::string vehicle_id;
  std::int64_t rud_timestamp_ms = 0;  // echoes the update that triggered planning
  std::uint64_t recommendation_id = 0;
  bool merge_flag = false;
  std::vector<Waypoint> waypoints;
  double processing_ms = 0.0;

  bool operator==(const Recommendation&) const = default;
};

struct Feedback {
  std::string vehicle_id;
  std::uint64_t recommendation_id = 0;
  bool accepted = false;

  bool operator==(const Feedback&) const = default;
};

struct ErrorMessage {
  std::string code;
  std::string message;

  bool operator==(const ErrorMessage&) const = default;
};

using Message = std::variant<RudUpdate, Subscribe, Recommendation, Feedback, ErrorMessage>;

const char* message_type(const Message& m);

// Raised by decode_message; `code` is stable and machine-readable
// ("bad_json", "bad_version", "unknown_type", "missing_field", "bad_field").
class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& message);
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// One message per line; the returned string carries no trailing newline.
std::string encode_message(const Message& m);

// Parses and validates one line. Headings are normalized into [0, 360).
Message decode_message(const std::string& line);

}  // namespace lanemerge::wire
