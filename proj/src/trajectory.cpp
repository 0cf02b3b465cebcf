#include "lanemerge/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace lanemerge::traj {

namespace {

constexpr double kFeetToMetres = 0.3048;
constexpr double kGridEpsilon = 1e-6;

bool parse_double(const std::string& token, double& out) {
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end != token.c_str() && *end == '\0' && std::isfinite(out);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool comma = line.find(',') != std::string::npos;
  for (char c : line) {
    bool sep = comma ? (c == ',') : (c == ' ' || c == '\t');
    if (sep) {
      if (comma || !current.empty()) {
        fields.push_back(current);
        current.clear();
      }
    } else if (c != '\r') {
      current += c;
    }
  }
  if (!current.empty() || (comma && !fields.empty())) fields.push_back(current);
  return fields;
}

}  // namespace

std::int64_t to_deci(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 10.0));
}

double from_deci(std::int64_t deci) {
  return static_cast<double>(deci) * kSamplePeriod;
}

int VehicleTrack::index_at(std::int64_t deci) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), deci,
                             [](const TrajectorySample& s, std::int64_t d) {
                               return to_deci(s.timestamp) < d;
                             });
  if (it == samples.end() || to_deci(it->timestamp) != deci) return -1;
  return static_cast<int>(it - samples.begin());
}

std::optional<TrajectorySample> VehicleTrack::sample_at(std::int64_t deci) const {
  if (samples.empty()) return std::nullopt;
  auto it = std::lower_bound(samples.begin(), samples.end(), deci,
                             [](const TrajectorySample& s, std::int64_t d) {
                               return to_deci(s.timestamp) < d;
                             });
  if (it != samples.end() && to_deci(it->timestamp) == deci) {
    TrajectorySample s = *it;
    s.timestamp = from_deci(deci);
    return s;
  }
  if (it == samples.begin() || it == samples.end()) return std::nullopt;

  const TrajectorySample& hi = *it;
  const TrajectorySample& lo = *(it - 1);
  const std::int64_t lo_deci = to_deci(lo.timestamp);
  const std::int64_t hi_deci = to_deci(hi.timestamp);
  const double frac =
      static_cast<double>(deci - lo_deci) / static_cast<double>(hi_deci - lo_deci);

  TrajectorySample s;
  s.vehicle_id = vehicle_id;
  s.timestamp = from_deci(deci);
  s.x = lo.x + frac * (hi.x - lo.x);
  s.y = lo.y + frac * (hi.y - lo.y);
  s.speed = lo.speed + frac * (hi.speed - lo.speed);
  s.acceleration = lo.acceleration + frac * (hi.acceleration - lo.acceleration);
  s.lane_id = frac <= 0.5 ? lo.lane_id : hi.lane_id;
  s.length = lo.length;
  s.width = lo.width;
  return s;
}

int ScenarioWindow::event_offset() const {
  const std::int64_t event_deci = to_deci(event.event_time);
  for (std::size_t i = 0; i < m_samples.size(); ++i) {
    if (to_deci(m_samples[i].timestamp) == event_deci) return static_cast<int>(i);
  }
  return static_cast<int>(m_samples.size()) / 2;
}

const char* to_string(WindowSkip skip) {
  switch (skip) {
    case WindowSkip::insufficient_history:
      return "insufficient_history";
    case WindowSkip::insufficient_future:
      return "insufficient_future";
    case WindowSkip::gap_in_track:
      return "gap_in_track";
  }
  return "unknown";
}

ParseError::ParseError(const std::string& message, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

VehicleTrack resample_to_grid(const VehicleTrack& track) {
  VehicleTrack out;
  out.vehicle_id = track.vehicle_id;
  if (track.samples.empty()) return out;
  if (track.samples.size() == 1) {
    TrajectorySample s = track.samples.front();
    s.timestamp = from_deci(to_deci(s.timestamp));
    out.samples.push_back(std::move(s));
    return out;
  }

  const double t_first = track.samples.front().timestamp;
  const double t_last = track.samples.back().timestamp;
  const std::int64_t first = static_cast<std::int64_t>(std::ceil(t_first / kSamplePeriod - kGridEpsilon));
  const std::int64_t last = static_cast<std::int64_t>(std::floor(t_last / kSamplePeriod + kGridEpsilon));

  std::size_t hi = 1;
  for (std::int64_t deci = first; deci <= last; ++deci) {
    const double t = from_deci(deci);
    while (hi + 1 < track.samples.size() && track.samples[hi].timestamp < t) ++hi;
    const TrajectorySample& b = track.samples[hi];
    const TrajectorySample& a = track.samples[hi - 1];
    const double span = b.timestamp - a.timestamp;
    const double frac = span > 0.0 ? std::clamp((t - a.timestamp) / span, 0.0, 1.0) : 0.0;

    TrajectorySample s;
    s.vehicle_id = track.vehicle_id;
    s.timestamp = t;
    s.x = a.x + frac * (b.x - a.x);
    s.y = a.y + frac * (b.y - a.y);
    s.speed = a.speed + frac * (b.speed - a.speed);
    s.acceleration = a.acceleration + frac * (b.acceleration - a.acceleration);
    s.lane_id = frac <= 0.5 ? a.lane_id : b.lane_id;
    s.length = a.length;
    s.width = a.width;
    out.samples.push_back(std::move(s));
  }
  return out;
}

std::vector<VehicleTrack> parse_trajectory_stream(std::istream& in, TrajectoryFormat format) {
  if (format != TrajectoryFormat::ngsim) {
    throw std::invalid_argument("unsupported trajectory format");
  }

  std::map<std::string, VehicleTrack> by_vehicle;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    auto fields = split_row(line);
    if (fields.empty()) continue;
    if (line_number == 1 && !fields.empty()) {
      double probe;
      if (!parse_double(fields[0], probe)) continue;  // header row
    }
    if (fields.size() < 14) {
      throw ParseError("expected at least 14 columns, got " + std::to_string(fields.size()),
                       line_number);
    }

    double time_ms, local_x, local_y, length_ft, width_ft, vel, acc, lane;
    if (!parse_double(fields[3], time_ms) || !parse_double(fields[4], local_x) ||
        !parse_double(fields[5], local_y) || !parse_double(fields[8], length_ft) ||
        !parse_double(fields[9], width_ft) || !parse_double(fields[11], vel) ||
        !parse_double(fields[12], acc) || !parse_double(fields[13], lane)) {
      throw ParseError("non-numeric field", line_number);
    }

    TrajectorySample s;
    s.vehicle_id = fields[0];
    s.timestamp = time_ms / 1000.0;
    s.x = local_x * kFeetToMetres;
    s.y = local_y * kFeetToMetres;
    s.length = length_ft * kFeetToMetres;
    s.width = width_ft * kFeetToMetres;
    s.speed = vel * kFeetToMetres;
    s.acceleration = acc * kFeetToMetres;
    s.lane_id = static_cast<int>(std::lround(lane));

    if (s.speed < 0.0) throw ParseError("negative speed", line_number);
    if (s.length <= 0.0) throw ParseError("non-positive vehicle length", line_number);
    if (s.width <= 0.0) throw ParseError("non-positive vehicle width", line_number);

    auto& track = by_vehicle[s.vehicle_id];
    track.vehicle_id = s.vehicle_id;
    track.samples.push_back(std::move(s));
  }

  std::vector<VehicleTrack> tracks;
  tracks.reserve(by_vehicle.size());
  for (auto& [id, track] : by_vehicle) {
    std::stable_sort(track.samples.begin(), track.samples.end(),
                     [](const TrajectorySample& a, const TrajectorySample& b) {
                       return a.timestamp < b.timestamp;
                     });

    bool on_grid = true;
    for (const auto& s : track.samples) {
      if (std::abs(s.timestamp * 10.0 - std::llround(s.timestamp * 10.0)) > kGridEpsilon) {
        on_grid = false;
        break;
      }
    }

    if (on_grid) {
      VehicleTrack cleaned;
      cleaned.vehicle_id = track.vehicle_id;
      std::int64_t prev = std::numeric_limits<std::int64_t>::min();
      for (auto& s : track.samples) {
        const std::int64_t deci = to_deci(s.timestamp);
        if (deci == prev) continue;  // drop duplicate timestamps, first wins
        prev = deci;
        s.timestamp = from_deci(deci);
        cleaned.samples.push_back(std::move(s));
      }
      tracks.push_back(std::move(cleaned));
    } else {
      tracks.push_back(resample_to_grid(track));
    }
  }
  return tracks;
}

std::vector<VehicleTrack> parse_trajectory_file(const std::string& path, TrajectoryFormat format) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory file: " + path);
  return parse_trajectory_stream(in, format);
}

std::vector<LaneChangeEvent> detect_lane_changes(const VehicleTrack& track) {
  std::vector<LaneChangeEvent> events;
  for (std::size_t i = 1; i < track.samples.size(); ++i) {
    if (track.samples[i].lane_id != track.samples[i - 1].lane_id) {
      LaneChangeEvent event;
      event.vehicle_id = track.vehicle_id;
      event.event_index = static_cast<int>(i);
      event.from_lane = track.samples[i - 1].lane_id;
      event.to_lane = track.samples[i].lane_id;
      event.event_time = track.samples[i].timestamp;
      events.push_back(std::move(event));
    }
  }
  return events;
}

WindowResult extract_window(const VehicleTrack& track, const LaneChangeEvent& event) {
  const std::int64_t event_deci = to_deci(event.event_time);
  const std::int64_t first = event_deci - kHistorySamples;
  const std::int64_t last = first + kWindowSize - 1;

  if (track.samples.empty()) return WindowSkip::insufficient_history;
  if (to_deci(track.samples.front().timestamp) > first) return WindowSkip::insufficient_history;
  if (to_deci(track.samples.back().timestamp) < last) return WindowSkip::insufficient_future;

  ScenarioWindow window;
  window.event = event;
  window.m_samples.reserve(kWindowSize);
  for (std::int64_t deci = first; deci <= last; ++deci) {
    const int idx = track.index_at(deci);
    if (idx < 0) return WindowSkip::gap_in_track;
    window.m_samples.push_back(track.samples[idx]);
  }
  return window;
}

ScenarioWindow assign_neighbors(const std::vector<VehicleTrack>& all_tracks, ScenarioWindow window) {
  const std::int64_t event_deci = to_deci(window.event.event_time);
  const int offset = window.event_offset();
  const TrajectorySample& m_at_event = window.m_samples[static_cast<std::size_t>(offset)];

  const VehicleTrack* preceding = nullptr;
  const VehicleTrack* following = nullptr;
  double best_ahead = std::numeric_limits<double>::infinity();
  double best_behind = -std::numeric_limits<double>::infinity();

  for (const auto& track : all_tracks) {
    if (track.vehicle_id == window.event.vehicle_id) continue;
    auto s = track.sample_at(event_deci);
    if (!s || s->lane_id != window.event.to_lane) continue;
    if (s->y > m_at_event.y) {
      if (s->y < best_ahead || (s->y == best_ahead && preceding && track.vehicle_id < preceding->vehicle_id)) {
        best_ahead = s->y;
        preceding = &track;
      }
    } else if (s->y < m_at_event.y) {
      if (s->y > best_behind || (s->y == best_behind && following && track.vehicle_id < following->vehicle_id)) {
        best_behind = s->y;
        following = &track;
      }
    }
  }

  const std::int64_t first = to_deci(window.m_samples.front().timestamp);
  auto aligned = [&](const VehicleTrack& track) {
    NeighborSamples out;
    out.vehicle_id = track.vehicle_id;
    out.samples.resize(window.m_samples.size());
    for (std::size_t i = 0; i < window.m_samples.size(); ++i) {
      out.samples[i] = track.sample_at(first + static_cast<std::int64_t>(i));
    }
    return out;
  };

  window.preceding.reset();
  window.following.reset();
  if (preceding) window.preceding = aligned(*preceding);
  if (following) window.following = aligned(*following);
  return window;
}

}  // namespace lanemerge::traj
