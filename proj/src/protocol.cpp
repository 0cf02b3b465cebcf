#include "lanemerge/protocol.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "lanemerge/heading.hpp"

namespace lanemerge::wire {

namespace {

using nlohmann::json;

constexpr const char* kTypeRudUpdate = "rud_update";
constexpr const char* kTypeSubscribe = "subscribe";
constexpr const char* kTypeRecommendation = "recommendation";
constexpr const char* kTypeFeedback = "feedback";
constexpr const char* kTypeError = "error";

const json& require(const json& payload, const char* field) {
  auto it = payload.find(field);
  if (it == payload.end()) {
    throw ProtocolError("missing_field", std::string("payload lacks '") + field + "'");
  }
  return *it;
}

std::string require_string(const json& payload, const char* field) {
  const json& v = require(payload, field);
  if (!v.is_string()) throw ProtocolError("bad_field", std::string(field) + " must be a string");
  return v.get<std::string>();
}

double require_number(const json& payload, const char* field) {
  const json& v = require(payload, field);
  if (!v.is_number()) throw ProtocolError("bad_field", std::string(field) + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ProtocolError("bad_field", std::string(field) + " must be finite");
  return d;
}

std::int64_t require_int(const json& payload, const char* field) {
  const json& v = require(payload, field);
  if (!v.is_number_integer()) {
    throw ProtocolError("bad_field", std::string(field) + " must be an integer");
  }
  return v.get<std::int64_t>();
}

bool require_bool(const json& payload, const char* field) {
  const json& v = require(payload, field);
  if (!v.is_boolean()) throw ProtocolError("bad_field", std::string(field) + " must be a boolean");
  return v.get<bool>();
}

json user_to_json(const RoadUser& u) {
  return json{{"id", u.id},
              {"timestamp_ms", u.timestamp_ms},
              {"x", u.x},
              {"y", u.y},
              {"speed", u.speed},
              {"acceleration", u.acceleration},
              {"heading", u.heading},
              {"lane_id", u.lane_id},
              {"length", u.length},
              {"width", u.width},
              {"connected", u.connected},
              {"merging", u.merging}};
}

RoadUser user_from_json(const json& payload) {
  RoadUser u;
  u.id = require_string(payload, "id");
  if (u.id.empty()) throw ProtocolError("bad_field", "id must be non-empty");
  u.timestamp_ms = require_int(payload, "timestamp_ms");
  if (u.timestamp_ms < 0) throw ProtocolError("bad_field", "timestamp_ms must be non-negative");
  u.x = require_number(payload, "x");
  u.y = require_number(payload, "y");
  u.speed = require_number(payload, "speed");
  if (u.speed < 0.0) throw ProtocolError("bad_field", "speed must be non-negative");
  u.acceleration = require_number(payload, "acceleration");
  u.heading = normalize_heading(require_number(payload, "heading"));
  u.lane_id = static_cast<int>(require_int(payload, "lane_id"));
  if (u.lane_id < 0) throw ProtocolError("bad_field", "lane_id must be non-negative");
  u.length = require_number(payload, "length");
  if (u.length <= 0.0) throw ProtocolError("bad_field", "length must be positive");
  u.width = require_number(payload, "width");
  if (u.width <= 0.0) throw ProtocolError("bad_field", "width must be positive");
  u.connected = require_bool(payload, "connected");
  u.merging = require_bool(payload, "merging");
  return u;
}

json waypoint_to_json(const Waypoint& w) {
  return json{{"t_offset_ms", w.t_offset_ms}, {"x", w.x},
              {"y", w.y},                     {"speed", w.speed},
              {"acceleration", w.acceleration}, {"heading", w.heading}};
}

Waypoint waypoint_from_json(const json& payload) {
  Waypoint w;
  w.t_offset_ms = require_int(payload, "t_offset_ms");
  if (w.t_offset_ms < 0) throw ProtocolError("bad_field", "t_offset_ms must be non-negative");
  w.x = require_number(payload, "x");
  w.y = require_number(payload, "y");
  w.speed = require_number(payload, "speed");
  if (w.speed < 0.0) throw ProtocolError("bad_field", "waypoint speed must be non-negative");
  w.acceleration = require_number(payload, "acceleration");
  w.heading = normalize_heading(require_number(payload, "heading"));
  return w;
}

}  // namespace

ProtocolError::ProtocolError(std::string code, const std::string& message)
    : std::runtime_error(message), code_(std::move(code)) {}

const char* message_type(const Message& m) {
  struct Visitor {
    const char* operator()(const RudUpdate&) const { return kTypeRudUpdate; }
    const char* operator()(const Subscribe&) const { return kTypeSubscribe; }
    const char* operator()(const Recommendation&) const { return kTypeRecommendation; }
    const char* operator()(const Feedback&) const { return kTypeFeedback; }
    const char* operator()(const ErrorMessage&) const { return kTypeError; }
  };
  return std::visit(Visitor{}, m);
}

std::string encode_message(const Message& m) {
  json payload;
  if (const auto* rud = std::get_if<RudUpdate>(&m)) {
    payload = user_to_json(rud->user);
  } else if (const auto* sub = std::get_if<Subscribe>(&m)) {
    payload = json{{"client", sub->client}};
  } else if (const auto* rec = std::get_if<Recommendation>(&m)) {
    json waypoints = json::array();
    for (const auto& w : rec->waypoints) waypoints.push_back(waypoint_to_json(w));
    payload = json{{"vehicle_id", rec->vehicle_id},
                   {"rud_timestamp_ms", rec->rud_timestamp_ms},
                   {"recommendation_id", rec->recommendation_id},
                   {"merge_flag", rec->merge_flag},
                   {"waypoints", std::move(waypoints)},
                   {"processing_ms", rec->processing_ms}};
  } else if (const auto* fb = std::get_if<Feedback>(&m)) {
    payload = json{{"vehicle_id", fb->vehicle_id},
                   {"recommendation_id", fb->recommendation_id},
                   {"accepted", fb->accepted}};
  } else if (const auto* err = std::get_if<ErrorMessage>(&m)) {
    payload = json{{"code", err->code}, {"message", err->message}};
  }

  json envelope{{"type", message_type(m)}, {"version", kProtocolVersion}, {"payload", payload}};
  return envelope.dump();
}

Message decode_message(const std::string& line) {
  json envelope;
  try {
    envelope = json::parse(line);
  } catch (const json::exception& e) {
    // parse_error for malformed text, out_of_range for overflowing numbers
    throw ProtocolError("bad_json", e.what());
  }
  if (!envelope.is_object()) throw ProtocolError("bad_json", "message must be an object");

  const auto version = envelope.find("version");
  if (version == envelope.end() || !version->is_number_integer() ||
      version->get<int>() != kProtocolVersion) {
    throw ProtocolError("bad_version", "message version must be 1");
  }

  const auto type_it = envelope.find("type");
  if (type_it == envelope.end() || !type_it->is_string()) {
    throw ProtocolError("unknown_type", "message lacks a type");
  }
  const std::string type = type_it->get<std::string>();

  const auto payload_it = envelope.find("payload");
  if (payload_it == envelope.end() || !payload_it->is_object()) {
    throw ProtocolError("missing_field", "message lacks a payload object");
  }
  const json& payload = *payload_it;

  if (type == kTypeRudUpdate) {
    return RudUpdate{user_from_json(payload)};
  }
  if (type == kTypeSubscribe) {
    Subscribe s;
    s.client = require_string(payload, "client");
    if (s.client.empty()) throw ProtocolError("bad_field", "client must be non-empty");
    return s;
  }
  if (type == kTypeRecommendation) {
    Recommendation rec;
    rec.vehicle_id = require_string(payload, "vehicle_id");
    if (rec.vehicle_id.empty()) throw ProtocolError("bad_field", "vehicle_id must be non-empty");
    rec.rud_timestamp_ms = require_int(payload, "rud_timestamp_ms");
    if (rec.rud_timestamp_ms < 0) {
      throw ProtocolError("bad_field", "rud_timestamp_ms must be non-negative");
    }
    const std::int64_t rec_id = require_int(payload, "recommendation_id");
    if (rec_id < 0) throw ProtocolError("bad_field", "recommendation_id must be non-negative");
    rec.recommendation_id = static_cast<std::uint64_t>(rec_id);
    rec.merge_flag = require_bool(payload, "merge_flag");
    const json& waypoints = require(payload, "waypoints");
    if (!waypoints.is_array() || waypoints.empty()) {
      throw ProtocolError("bad_field", "waypoints must be a non-empty array");
    }
    for (const auto& entry : waypoints) {
      if (!entry.is_object()) throw ProtocolError("bad_field", "waypoint must be an object");
      rec.waypoints.push_back(waypoint_from_json(entry));
    }
    rec.processing_ms = require_number(payload, "processing_ms");
    if (rec.processing_ms < 0.0) {
      throw ProtocolError("bad_field", "processing_ms must be non-negative");
    }
    return rec;
  }
  if (type == kTypeFeedback) {
    Feedback fb;
    fb.vehicle_id = require_string(payload, "vehicle_id");
    if (fb.vehicle_id.empty()) throw ProtocolError("bad_field", "vehicle_id must be non-empty");
    const std::int64_t rec_id = require_int(payload, "recommendation_id");
    if (rec_id < 0) throw ProtocolError("bad_field", "recommendation_id must be non-negative");
    fb.recommendation_id = static_cast<std::uint64_t>(rec_id);
    fb.accepted = require_bool(payload, "accepted");
    return fb;
  }
  if (type == kTypeError) {
    ErrorMessage err;
    err.code = require_string(payload, "code");
    err.message = require_string(payload, "message");
    return err;
  }
  throw ProtocolError("unknown_type", "unsupported message type: " + type);
}

}  // namespace lanemerge::wire
