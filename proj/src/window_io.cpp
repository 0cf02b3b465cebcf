#include "lanemerge/window_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lanemerge::traj {

namespace {

using nlohmann::json;

json sample_to_json(const TrajectorySample& s) {
  return json::array({s.timestamp, s.x, s.y, s.lane_id, s.speed, s.acceleration, s.length, s.width});
}

TrajectorySample sample_from_json(const json& j, const std::string& vehicle_id) {
  if (!j.is_array() || j.size() != 8) throw std::runtime_error("malformed sample entry");
  TrajectorySample s;
  s.vehicle_id = vehicle_id;
  s.timestamp = j[0].get<double>();
  s.x = j[1].get<double>();
  s.y = j[2].get<double>();
  s.lane_id = j[3].get<int>();
  s.speed = j[4].get<double>();
  s.acceleration = j[5].get<double>();
  s.length = j[6].get<double>();
  s.width = j[7].get<double>();
  return s;
}

json neighbor_to_json(const NeighborSamples& n) {
  json samples = json::array();
  for (const auto& s : n.samples) {
    if (s) {
      samples.push_back(sample_to_json(*s));
    } else {
      samples.push_back(nullptr);
    }
  }
  return json{{"vehicle_id", n.vehicle_id}, {"samples", std::move(samples)}};
}

NeighborSamples neighbor_from_json(const json& j) {
  NeighborSamples n;
  n.vehicle_id = j.at("vehicle_id").get<std::string>();
  for (const auto& entry : j.at("samples")) {
    if (entry.is_null()) {
      n.samples.push_back(std::nullopt);
    } else {
      n.samples.push_back(sample_from_json(entry, n.vehicle_id));
    }
  }
  return n;
}

}  // namespace

void write_windows(std::ostream& out, const std::vector<ScenarioWindow>& windows) {
  for (const auto& w : windows) {
    json j;
    j["vehicle_id"] = w.event.vehicle_id;
    j["event"] = {{"index", w.event.event_index},
                  {"from_lane", w.event.from_lane},
                  {"to_lane", w.event.to_lane},
                  {"time", w.event.event_time}};
    json samples = json::array();
    for (const auto& s : w.m_samples) samples.push_back(sample_to_json(s));
    j["samples"] = std::move(samples);
    if (w.preceding) j["preceding"] = neighbor_to_json(*w.preceding);
    if (w.following) j["following"] = neighbor_to_json(*w.following);
    out << j.dump() << '\n';
  }
}

void write_windows_file(const std::string& path, const std::vector<ScenarioWindow>& windows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_windows(out, windows);
}

std::vector<ScenarioWindow> read_windows(std::istream& in) {
  std::vector<ScenarioWindow> windows;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("window file line " + std::to_string(line_number) + ": " + e.what());
    }
    ScenarioWindow w;
    w.event.vehicle_id = j.at("vehicle_id").get<std::string>();
    const auto& ev = j.at("event");
    w.event.event_index = ev.at("index").get<int>();
    w.event.from_lane = ev.at("from_lane").get<int>();
    w.event.to_lane = ev.at("to_lane").get<int>();
    w.event.event_time = ev.at("time").get<double>();
    for (const auto& entry : j.at("samples")) {
      w.m_samples.push_back(sample_from_json(entry, w.event.vehicle_id));
    }
    if (j.contains("preceding")) w.preceding = neighbor_from_json(j.at("preceding"));
    if (j.contains("following")) w.following = neighbor_from_json(j.at("following"));
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<ScenarioWindow> read_windows_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open window file: " + path);
  return read_windows(in);
}

}  // namespace lanemerge::traj
