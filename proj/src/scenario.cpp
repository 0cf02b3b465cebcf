#include "lanemerge/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "lanemerge/heading.hpp"
#include "lanemerge/rng.hpp"

namespace lanemerge::replay {

namespace {

using nlohmann::json;

struct VehicleSetup {
  std::string id;
  int lane;
  double x;
  double y0;
  double speed;
  double length;
  double width;
  bool connected;
  bool merging;
};

}  // namespace

ScenarioTrace synth_scenario(const ScenarioParams& params) {
  if (params.duration_s <= 0.0 || params.rate_hz <= 0.0) {
    throw std::invalid_argument("scenario needs positive duration and rate");
  }

  std::mt19937_64 rng(params.seed);
  const double speed_jitter = draw_range(rng, -0.6, 0.6);
  const double gap_jitter = draw_range(rng, -2.0, 2.0);

  const VehicleSetup setups[] = {
      {"veh-m", params.merge_lane, params.merge_lane_x, params.merging_y0,
       params.merging_speed + speed_jitter, 4.6, 1.8, true, true},
      {"veh-p", params.target_lane, params.target_lane_x, params.preceding_y0 + gap_jitter,
       params.preceding_speed + 0.5 * speed_jitter, 4.8, 1.9, false, false},
      {"veh-f", params.target_lane, params.target_lane_x, params.following_y0 - gap_jitter,
       params.following_speed - 0.5 * speed_jitter, 4.4, 1.8, false, false},
  };

  const auto tick_count = static_cast<std::size_t>(std::llround(params.duration_s * params.rate_hz));
  const double dt = 1.0 / params.rate_hz;
  const double taper = std::max(params.merge_end_s - params.merge_start_s, dt);

  ScenarioTrace trace;
  trace.meta.name = params.name;
  trace.meta.rate_hz = params.rate_hz;

  for (std::size_t tick = 0; tick < tick_count; ++tick) {
    const double t = static_cast<double>(tick) * dt;
    const auto timestamp =
        params.base_time_ms + static_cast<std::int64_t>(std::llround(t * 1000.0));

    for (const auto& setup : setups) {
      wire::RoadUser u;
      u.id = setup.id;
      u.timestamp_ms = timestamp;
      u.y = setup.y0 + setup.speed * t;
      u.speed = setup.speed;
      u.acceleration = 0.0;
      u.length = setup.length;
      u.width = setup.width;
      u.connected = setup.connected;
      u.merging = setup.merging;

      if (setup.merging) {
        const double progress = std::clamp((t - params.merge_start_s) / taper, 0.0, 1.0);
        u.x = setup.x + progress * (params.target_lane_x - setup.x);
        u.lane_id = progress < 0.5 ? setup.lane : params.target_lane;
        const double dx_dt = (params.target_lane_x - setup.x) / taper;
        const bool tapering = t >= params.merge_start_s && t <= params.merge_end_s;
        u.heading = tapering ? bearing_degrees(dx_dt, setup.speed) : 90.0;
      } else {
        u.x = setup.x;
        u.lane_id = setup.lane;
        u.heading = 90.0;
      }
      trace.updates.push_back(wire::RudUpdate{std::move(u)});
    }
  }
  trace.meta.message_count = trace.updates.size();
  return trace;
}

void write_trace_file(const std::string& path, const ScenarioTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file for writing: " + path);

  json meta{{"type", "trace_meta"},
            {"version", 1},
            {"payload",
             {{"name", trace.meta.name},
              {"rate_hz", trace.meta.rate_hz},
              {"message_count", trace.updates.size()}}}};
  out << meta.dump() << '\n';
  for (const auto& update : trace.updates) {
    out << wire::encode_message(update) << '\n';
  }
}

ScenarioTrace read_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);

  ScenarioTrace trace;
  json meta;
  try {
    meta = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed trace header: ") + e.what());
  }
  if (meta.value("type", "") != "trace_meta") {
    throw std::runtime_error("trace file must start with a trace_meta line");
  }
  const json& payload = meta.at("payload");
  trace.meta.name = payload.at("name").get<std::string>();
  trace.meta.rate_hz = payload.at("rate_hz").get<double>();
  trace.meta.message_count = payload.at("message_count").get<std::size_t>();

  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto message = wire::decode_message(line);
    const auto* update = std::get_if<wire::RudUpdate>(&message);
    if (!update) {
      throw std::runtime_error("trace line " + std::to_string(line_number) +
                               ": expected rud_update, got " + wire::message_type(message));
    }
    trace.updates.push_back(*update);
  }

  if (trace.updates.size() != trace.meta.message_count) {
    throw std::runtime_error("trace message count mismatch: header says " +
                             std::to_string(trace.meta.message_count) + ", file has " +
                             std::to_string(trace.updates.size()));
  }
  return trace;
}

}  // namespace lanemerge::replay
