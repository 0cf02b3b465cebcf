#include "lanemerge/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lanemerge/rng.hpp"

namespace lanemerge::synth {

namespace {

constexpr double kMetresToFeet = 1.0 / 0.3048;

struct Kinematics {
  double y0 = 0.0;
  double speed0 = 13.0;
  double accel_base = 0.0;
  double accel_wave = 0.0;
  double accel_period = 5.0;
};

double accel_at(const Kinematics& k, double t) {
  return k.accel_base + k.accel_wave * std::sin(2.0 * M_PI * t / k.accel_period);
}

// Forward-Euler ride along the lane; returns {y, speed} after t seconds.
std::pair<double, double> advance(const Kinematics& k, double t, double dt = 0.1) {
  double y = k.y0;
  double v = k.speed0;
  for (double s = 0.0; s + dt / 2.0 < t; s += dt) {
    v = std::max(0.0, v + accel_at(k, s) * dt);
    y += v * dt;
  }
  return {y, v};
}

}  // namespace

void write_raw_fixture(const std::string& path, int events, std::uint64_t seed) {
  if (events <= 0) throw std::invalid_argument("need at least one event");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open fixture file for writing: " + path);

  out << "Vehicle_ID,Frame_ID,Total_Frames,Global_Time,Local_X,Local_Y,Global_X,Global_Y,"
         "v_Length,v_Width,v_Class,v_Vel,v_Acc,Lane_ID,Preceding,Following,Space_Headway,"
         "Time_Headway\n";

  constexpr int kSamplesPerVehicle = 100;
  constexpr int kEventSample = 50;  // 5.0 s into each event's slice
  char row[512];

  for (int e = 0; e < events; ++e) {
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(e)));
    const double base_s = e * 20.0;
    const bool fast_follower = draw_unit(rng) < 0.25;

    Kinematics m;
    m.y0 = 30.0 + draw_range(rng, -5.0, 5.0);
    m.speed0 = draw_range(rng, 10.0, 16.0);
    m.accel_base = draw_range(rng, -0.3, 0.3);
    m.accel_wave = draw_range(rng, 0.2, 0.8);

    Kinematics p;
    p.y0 = m.y0 + draw_range(rng, 10.0, 34.0);
    p.speed0 = m.speed0 + draw_range(rng, -1.5, 1.5);
    p.accel_base = draw_range(rng, -0.2, 0.2);
    p.accel_wave = draw_range(rng, 0.1, 0.4);

    Kinematics f;
    f.y0 = m.y0 - draw_range(rng, 8.0, 30.0);
    f.speed0 = fast_follower ? m.speed0 + draw_range(rng, 3.0, 6.0)
                             : m.speed0 + draw_range(rng, -1.5, 1.0);
    f.accel_base = draw_range(rng, -0.2, 0.2);
    f.accel_wave = draw_range(rng, 0.1, 0.4);

    const double m_len = draw_range(rng, 4.2, 5.2);
    const double p_len = draw_range(rng, 4.2, 5.2);
    const double f_len = draw_range(rng, 4.2, 5.2);

    struct Row {
      int id;
      const Kinematics* k;
      double length;
      bool is_merger;
    };
    const Row vehicles[] = {{1000 + e * 10, &m, m_len, true},
                            {1001 + e * 10, &p, p_len, false},
                            {1002 + e * 10, &f, f_len, false}};

    for (const auto& vehicle : vehicles) {
      for (int s = 0; s < kSamplesPerVehicle; ++s) {
        const double t = s * 0.1;
        const auto [y, v] = advance(*vehicle.k, t);
        const double a = accel_at(*vehicle.k, t);

        double x = 0.0;
        int lane = 1;
        if (vehicle.is_merger) {
          const double progress = std::clamp((s - 30) / 40.0, 0.0, 1.0);
          x = 3.5 * (1.0 - progress);
          lane = s < kEventSample ? 2 : 1;
        }

        const long long global_ms = static_cast<long long>(std::llround((base_s + t) * 1000.0));
        std::snprintf(row, sizeof row,
                      "%d,%d,%d,%lld,%.3f,%.3f,%.3f,%.3f,%.2f,%.2f,2,%.3f,%.3f,%d,0,0,0,0\n",
                      vehicle.id, s + 1, kSamplesPerVehicle, global_ms, x * kMetresToFeet,
                      y * kMetresToFeet, x * kMetresToFeet, y * kMetresToFeet,
                      vehicle.length * kMetresToFeet, 1.8 * kMetresToFeet, v * kMetresToFeet,
                      a * kMetresToFeet, lane);
        out << row;
      }
    }
  }
}

traj::ScenarioWindow random_window(std::mt19937_64& rng, int ordinal) {
  const double base_s = ordinal * 30.0;
  const double event_s = base_s + 4.0;
  const bool has_preceding = draw_unit(rng) < 0.85;
  const bool has_following = draw_unit(rng) < 0.85;
  const bool fast_follower = has_following && draw_unit(rng) < 0.3;

  Kinematics m;
  m.y0 = draw_range(rng, 20.0, 60.0);
  m.speed0 = draw_range(rng, 8.0, 18.0);
  m.accel_base = draw_range(rng, -0.4, 0.4);
  m.accel_wave = draw_range(rng, 0.2, 0.9);
  m.accel_period = draw_range(rng, 3.0, 8.0);
  const double m_len = draw_range(rng, 3.8, 5.4);

  traj::ScenarioWindow window;
  window.event.vehicle_id = "m-" + std::to_string(ordinal);
  window.event.event_index = traj::kHistorySamples;
  window.event.from_lane = 2;
  window.event.to_lane = 1;
  window.event.event_time = event_s;

  for (int i = 0; i < traj::kWindowSize; ++i) {
    const double t = i * 0.1;
    const auto [y, v] = advance(m, t);
    traj::TrajectorySample s;
    s.vehicle_id = window.event.vehicle_id;
    s.timestamp = base_s + t;
    const double progress = std::clamp((i - 25) / 30.0, 0.0, 1.0);
    s.x = 3.5 * (1.0 - progress);
    s.y = y;
    s.lane_id = i < traj::kHistorySamples ? 2 : 1;
    s.speed = v;
    s.acceleration = accel_at(m, t);
    s.length = m_len;
    s.width = 1.8;
    window.m_samples.push_back(std::move(s));
  }

  auto make_neighbor = [&](const std::string& id, double y_offset, double speed) {
    Kinematics k;
    k.y0 = m.y0 + y_offset;
    k.speed0 = speed;
    k.accel_base = draw_range(rng, -0.2, 0.2);
    k.accel_wave = draw_range(rng, 0.1, 0.4);
    const double length = draw_range(rng, 3.8, 5.4);
    const bool ragged_start = draw_unit(rng) < 0.2;
    const int first_present = ragged_start ? draw_int(rng, 1, 8) : 0;

    traj::NeighborSamples n;
    n.vehicle_id = id;
    for (int i = 0; i < traj::kWindowSize; ++i) {
      if (i < first_present) {
        n.samples.emplace_back(std::nullopt);
        continue;
      }
      const double t = i * 0.1;
      const auto [y, v] = advance(k, t);
      traj::TrajectorySample s;
      s.vehicle_id = id;
      s.timestamp = base_s + t;
      s.x = 0.0;
      s.y = y;
      s.lane_id = 1;
      s.speed = v;
      s.acceleration = accel_at(k, t);
      s.length = length;
      s.width = 1.8;
      n.samples.emplace_back(std::move(s));
    }
    return n;
  };

  if (has_preceding) {
    window.preceding = make_neighbor("p-" + std::to_string(ordinal), draw_range(rng, 7.0, 32.0),
                                     m.speed0 + draw_range(rng, -2.0, 2.0));
  }
  if (has_following) {
    const double speed = fast_follower ? m.speed0 + draw_range(rng, 3.0, 7.0)
                                       : m.speed0 + draw_range(rng, -2.0, 1.5);
    window.following =
        make_neighbor("f-" + std::to_string(ordinal), -draw_range(rng, 7.0, 32.0), speed);
  }
  return window;
}

std::vector<traj::ScenarioWindow> random_windows(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<traj::ScenarioWindow> windows;
  windows.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) windows.push_back(random_window(rng, i));
  return windows;
}

}  // namespace lanemerge::synth
