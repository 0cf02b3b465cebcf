#include <doctest.h>

#include <cmath>
#include <sstream>

#include "lanemerge/synth.hpp"
#include "lanemerge/trajectory.hpp"
#include "lanemerge/window_io.hpp"

using namespace lanemerge;

namespace {

traj::TrajectorySample make_sample(const std::string& id, double t, double x, double y, int lane,
                                   double speed = 10.0, double acc = 0.0, double len = 4.0) {
  traj::TrajectorySample s;
  s.vehicle_id = id;
  s.timestamp = t;
  s.x = x;
  s.y = y;
  s.lane_id = lane;
  s.speed = speed;
  s.acceleration = acc;
  s.length = len;
  s.width = 1.8;
  return s;
}

traj::VehicleTrack straight_track(const std::string& id, double t0, int samples, int lane,
                                  double y0 = 0.0, double speed = 10.0) {
  traj::VehicleTrack track;
  track.vehicle_id = id;
  for (int i = 0; i < samples; ++i) {
    const double t = t0 + i * 0.1;
    track.samples.push_back(make_sample(id, t, 0.0, y0 + speed * i * 0.1, lane, speed));
  }
  return track;
}

bool same_sample(const traj::TrajectorySample& a, const traj::TrajectorySample& b) {
  return a.vehicle_id == b.vehicle_id && a.timestamp == b.timestamp && a.x == b.x && a.y == b.y &&
         a.lane_id == b.lane_id && a.speed == b.speed && a.acceleration == b.acceleration &&
         a.length == b.length && a.width == b.width;
}

}  // namespace

TEST_CASE("decisecond grid round trips") {
  CHECK(traj::to_deci(0.0) == 0);
  CHECK(traj::to_deci(96.0) == 960);
  CHECK(traj::to_deci(102.9) == 1029);
  CHECK(traj::to_deci(-0.1) == -1);
  CHECK(traj::from_deci(1029) == doctest::Approx(102.9));
  for (int k = -50; k <= 50; ++k) { CHECK(traj::to_deci(traj::from_deci(k)) == k); }
}

TEST_CASE("track lookup interpolates interior gaps only") {
  traj::VehicleTrack track;
  track.vehicle_id = "a";
  track.samples.push_back(make_sample("a", 1.0, 0.0, 0.0, 2, 10.0, 0.5));
  track.samples.push_back(make_sample("a", 1.2, 1.0, 2.0, 3, 12.0, 0.7));

  CHECK(track.index_at(traj::to_deci(1.2)) == 1);
  CHECK(track.index_at(traj::to_deci(1.1)) == -1);

  const auto mid = track.sample_at(traj::to_deci(1.1));
  REQUIRE(mid.has_value());
  CHECK(mid->x == doctest::Approx(0.5));
  CHECK(mid->y == doctest::Approx(1.0));
  CHECK(mid->speed == doctest::Approx(11.0));
  CHECK(mid->acceleration == doctest::Approx(0.6));
  // Lane ids are discrete: the nearer endpoint wins, earlier on an exact tie.
  CHECK(mid->lane_id == 2);

  CHECK_FALSE(track.sample_at(traj::to_deci(0.9)).has_value());
  CHECK_FALSE(track.sample_at(traj::to_deci(1.3)).has_value());
}

TEST_CASE("raw parsing converts units and groups tracks") {
  // Same column layout as the public highway captures: positions and speeds
  // arrive in feet and the timestamp in milliseconds.
  std::istringstream in(
      "Vehicle_ID,Frame_ID,Total_Frames,Global_Time,Local_X,Local_Y,Global_X,Global_Y,"
      "v_Length,v_Width,v_Class,v_Vel,v_Acc,Lane_ID,Preceding,Following,Space_Headway,"
      "Time_Headway\n"
      "7,1,2,100,32.808398950131235,328.08398950131233,0,0,16.404199475065617,6,2,"
      "32.808398950131235,3.2808398950131235,2,0,0,0,0\n"
      "7,2,2,200,32.808398950131235,331.36482939632543,0,0,16.404199475065617,6,2,"
      "32.808398950131235,3.2808398950131235,2,0,0,0,0\n"
      "5,1,1,100,0,16.404199475065617,0,0,14,6,2,29,0,1,0,0,0,0\n");
  const auto tracks = traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim);

  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].vehicle_id == "5");
  CHECK(tracks[1].vehicle_id == "7");

  const auto& seven = tracks[1];
  REQUIRE(seven.samples.size() == 2);
  CHECK(seven.samples[0].timestamp == doctest::Approx(0.1));
  CHECK(seven.samples[0].x == doctest::Approx(10.0));
  CHECK(seven.samples[0].y == doctest::Approx(100.0));
  CHECK(seven.samples[0].length == doctest::Approx(5.0));
  CHECK(seven.samples[0].speed == doctest::Approx(10.0));
  CHECK(seven.samples[0].acceleration == doctest::Approx(1.0));
  CHECK(seven.samples[0].lane_id == 2);
  CHECK(seven.samples[1].y == doctest::Approx(101.0));
}

TEST_CASE("raw parsing accepts whitespace separation and skips the header") {
  std::istringstream in(
      "id frame total time x y gx gy len w cls vel acc lane p f sh th\n"
      "3 1 1 0 0 0 0 0 14 6 2 10 0 1 0 0 0 0\n");
  const auto tracks = traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim);
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].samples.size() == 1);
}

TEST_CASE("raw parsing reports the offending line") {
  SUBCASE("non-numeric field") {
    std::istringstream in("1,1,1,zero,0,0,0,0,14,6,2,10,0,1,0,0,0,0\n");
    CHECK_THROWS_AS(traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim),
                    traj::ParseError);
  }
  SUBCASE("negative speed") {
    std::istringstream in("1,1,1,0,0,0,0,0,14,6,2,-10,0,1,0,0,0,0\n");
    try {
      traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim);
      FAIL("expected a parse error");
    } catch (const traj::ParseError& e) {
      CHECK(e.line() == 1);
    }
  }
  SUBCASE("too few columns") {
    std::istringstream in("1,2,3\n");
    CHECK_THROWS_AS(traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim),
                    traj::ParseError);
  }
  SUBCASE("non-positive length") {
    std::istringstream in("1,1,1,0,0,0,0,0,0,6,2,10,0,1,0,0,0,0\n");
    CHECK_THROWS_AS(traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim),
                    traj::ParseError);
  }
}

TEST_CASE("duplicate timestamps keep the first record") {
  std::istringstream in(
      "1,1,2,100,0,0,0,0,14,6,2,10,0,1,0,0,0,0\n"
      "1,2,2,100,0,328.08398950131233,0,0,14,6,2,10,0,1,0,0,0,0\n");
  const auto tracks = traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim);
  REQUIRE(tracks.size() == 1);
  REQUIRE(tracks[0].samples.size() == 1);
  CHECK(tracks[0].samples[0].y == doctest::Approx(0.0));
}

TEST_CASE("off-grid tracks are resampled onto the grid") {
  // 25 Hz reports: 0, 40, 80, 120 ms.
  std::ostringstream raw;
  for (int i = 0; i < 4; ++i) {
    raw << "9,1,4," << i * 40 << ",0," << i * 1.312335958005249 << ",0,0,14,6,2,10,0,1,0,0,0,0\n";
  }
  std::istringstream in(raw.str());
  const auto tracks = traj::parse_trajectory_stream(in, traj::TrajectoryFormat::ngsim);
  REQUIRE(tracks.size() == 1);
  const auto& t = tracks[0];
  REQUIRE(t.samples.size() == 2);  // 0.0 and 0.1 s fit inside 0..0.12 s
  CHECK(t.samples[0].timestamp == doctest::Approx(0.0));
  CHECK(t.samples[1].timestamp == doctest::Approx(0.1));
  CHECK(t.samples[1].y == doctest::Approx(1.0));  // 0.4 m per 40 ms -> 1 m at 100 ms
}

TEST_CASE("lane change detection finds transitions") {
  traj::VehicleTrack track;
  track.vehicle_id = "x";
  const int lanes1[] = {2, 2, 2, 3, 3};
  for (int i = 0; i < 5; ++i) track.samples.push_back(make_sample("x", i * 0.1, 0, i, lanes1[i]));

  auto events = traj::detect_lane_changes(track);
  REQUIRE(events.size() == 1);
  CHECK(events[0].event_index == 3);
  CHECK(events[0].from_lane == 2);
  CHECK(events[0].to_lane == 3);
  CHECK(events[0].event_time == doctest::Approx(0.3));

  track.samples.clear();
  const int lanes2[] = {3, 4, 3};
  for (int i = 0; i < 3; ++i) track.samples.push_back(make_sample("x", i * 0.1, 0, i, lanes2[i]));
  CHECK(traj::detect_lane_changes(track).size() == 2);

  track.samples.clear();
  for (int i = 0; i < 3; ++i) track.samples.push_back(make_sample("x", i * 0.1, 0, i, 4));
  CHECK(traj::detect_lane_changes(track).empty());
}

TEST_CASE("window extraction takes 4 s before and 2.9 s after the event") {
  auto track = straight_track("m", 95.0, 100, 2);
  for (int i = 50; i < 100; ++i) track.samples[static_cast<std::size_t>(i)].lane_id = 1;

  const auto events = traj::detect_lane_changes(track);
  REQUIRE(events.size() == 1);
  CHECK(events[0].event_time == doctest::Approx(100.0));

  const auto result = traj::extract_window(track, events[0]);
  REQUIRE(std::holds_alternative<traj::ScenarioWindow>(result));
  const auto& window = std::get<traj::ScenarioWindow>(result);

  REQUIRE(window.m_samples.size() == traj::kWindowSize);
  CHECK(window.m_samples.front().timestamp == doctest::Approx(96.0));
  CHECK(window.m_samples.back().timestamp == doctest::Approx(102.9));
  CHECK(window.event_offset() == traj::kHistorySamples);
  CHECK(window.m_samples[traj::kHistorySamples].timestamp == doctest::Approx(100.0));
  CHECK(window.m_samples[traj::kHistorySamples].lane_id == 1);
  CHECK(window.m_samples[traj::kHistorySamples - 1].lane_id == 2);
}

TEST_CASE("window extraction names the reason a track falls short") {
  SUBCASE("not enough history") {
    auto track = straight_track("m", 0.0, 80, 2);
    for (int i = 20; i < 80; ++i) track.samples[static_cast<std::size_t>(i)].lane_id = 1;
    const auto events = traj::detect_lane_changes(track);
    REQUIRE(events.size() == 1);
    const auto result = traj::extract_window(track, events[0]);
    REQUIRE(std::holds_alternative<traj::WindowSkip>(result));
    CHECK(std::get<traj::WindowSkip>(result) == traj::WindowSkip::insufficient_history);
  }
  SUBCASE("not enough future") {
    auto track = straight_track("m", 0.0, 60, 2);
    for (int i = 45; i < 60; ++i) track.samples[static_cast<std::size_t>(i)].lane_id = 1;
    const auto events = traj::detect_lane_changes(track);
    REQUIRE(events.size() == 1);
    const auto result = traj::extract_window(track, events[0]);
    REQUIRE(std::holds_alternative<traj::WindowSkip>(result));
    CHECK(std::get<traj::WindowSkip>(result) == traj::WindowSkip::insufficient_future);
  }
  SUBCASE("hole in the middle of the span") {
    auto track = straight_track("m", 0.0, 100, 2);
    for (int i = 50; i < 100; ++i) track.samples[static_cast<std::size_t>(i)].lane_id = 1;
    track.samples.erase(track.samples.begin() + 20);
    const auto events = traj::detect_lane_changes(track);
    REQUIRE(events.size() == 1);
    const auto result = traj::extract_window(track, events[0]);
    REQUIRE(std::holds_alternative<traj::WindowSkip>(result));
    CHECK(std::get<traj::WindowSkip>(result) == traj::WindowSkip::gap_in_track);
  }
}

TEST_CASE("neighbour assignment picks the closest pair in the target lane") {
  auto m_track = straight_track("10", 0.0, 100, 2, 50.0);
  for (int i = 50; i < 100; ++i) m_track.samples[static_cast<std::size_t>(i)].lane_id = 1;

  // At the event (t = 5.0 s) the merging vehicle sits at y = 100.
  const auto ahead_near = straight_track("20", 0.0, 100, 1, 70.0);   // y = 120 at event
  const auto ahead_far = straight_track("30", 0.0, 100, 1, 90.0);    // y = 140
  const auto behind_near = straight_track("40", 0.0, 100, 1, 30.0);  // y = 80
  const auto other_lane = straight_track("50", 0.0, 100, 3, 49.0);   // ignored

  const auto events = traj::detect_lane_changes(m_track);
  REQUIRE(events.size() == 1);
  auto window = std::get<traj::ScenarioWindow>(traj::extract_window(m_track, events[0]));
  window = traj::assign_neighbors({m_track, ahead_near, ahead_far, behind_near, other_lane},
                                  std::move(window));

  REQUIRE(window.preceding.has_value());
  REQUIRE(window.following.has_value());
  CHECK(window.preceding->vehicle_id == "20");
  CHECK(window.following->vehicle_id == "40");
  REQUIRE(window.preceding->samples.size() == traj::kWindowSize);
  REQUIRE(window.following->samples.size() == traj::kWindowSize);
  for (int i = 0; i < traj::kWindowSize; ++i) {
    const auto& slot = window.preceding->samples[static_cast<std::size_t>(i)];
    REQUIRE(slot.has_value());
    CHECK(slot->timestamp ==
          doctest::Approx(window.m_samples[static_cast<std::size_t>(i)].timestamp));
  }
}

TEST_CASE("neighbour assignment leaves missing sides empty and breaks ties by id") {
  auto m_track = straight_track("10", 0.0, 100, 2, 50.0);
  for (int i = 50; i < 100; ++i) m_track.samples[static_cast<std::size_t>(i)].lane_id = 1;
  const auto events = traj::detect_lane_changes(m_track);
  REQUIRE(events.size() == 1);

  SUBCASE("empty target lane") {
    auto window = std::get<traj::ScenarioWindow>(traj::extract_window(m_track, events[0]));
    window = traj::assign_neighbors({m_track}, std::move(window));
    CHECK_FALSE(window.preceding.has_value());
    CHECK_FALSE(window.following.has_value());
  }
  SUBCASE("equidistant candidates resolve to the smaller id") {
    const auto twin_a = straight_track("21", 0.0, 100, 1, 70.0);
    const auto twin_b = straight_track("22", 0.0, 100, 1, 70.0);
    auto window = std::get<traj::ScenarioWindow>(traj::extract_window(m_track, events[0]));
    window = traj::assign_neighbors({m_track, twin_b, twin_a}, std::move(window));
    REQUIRE(window.preceding.has_value());
    CHECK(window.preceding->vehicle_id == "21");
  }
}

TEST_CASE("window files round trip exactly") {
  const auto windows = lanemerge::synth::random_windows(8, 20250301);

  std::stringstream buffer;
  traj::write_windows(buffer, windows);
  const auto back = traj::read_windows(buffer);

  REQUIRE(back.size() == windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& a = windows[w];
    const auto& b = back[w];
    CHECK(a.event.vehicle_id == b.event.vehicle_id);
    CHECK(a.event.event_index == b.event.event_index);
    CHECK(a.event.from_lane == b.event.from_lane);
    CHECK(a.event.to_lane == b.event.to_lane);
    CHECK(a.event.event_time == b.event.event_time);
    REQUIRE(a.m_samples.size() == b.m_samples.size());
    for (std::size_t i = 0; i < a.m_samples.size(); ++i) {
      CHECK(same_sample(a.m_samples[i], b.m_samples[i]));
    }
    REQUIRE(a.preceding.has_value() == b.preceding.has_value());
    REQUIRE(a.following.has_value() == b.following.has_value());
    for (const auto* pair : {&a.preceding, &a.following}) {
      const bool is_preceding = pair == &a.preceding;
      if (!pair->has_value()) continue;
      const auto& na = **pair;
      const auto& nb = is_preceding ? *b.preceding : *b.following;
      CHECK(na.vehicle_id == nb.vehicle_id);
      REQUIRE(na.samples.size() == nb.samples.size());
      for (std::size_t i = 0; i < na.samples.size(); ++i) {
        REQUIRE(na.samples[i].has_value() == nb.samples[i].has_value());
        if (na.samples[i]) CHECK(same_sample(*na.samples[i], *nb.samples[i]));
      }
    }
  }
}

TEST_CASE("window files reject malformed lines with their line number") {
  std::istringstream in("{\"event\":{}}\n");
  CHECK_THROWS(traj::read_windows(in));
}
