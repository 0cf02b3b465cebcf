#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lanemerge/dataset.hpp"
#include "lanemerge/heading.hpp"
#include "lanemerge/labeler.hpp"
#include "lanemerge/rng.hpp"
#include "lanemerge/safety.hpp"
#include "lanemerge/synth.hpp"
#include "oracles.hpp"

using namespace lanemerge;

namespace {

safety::ActorState actor(double x, double y, double speed, double length, double accel = 0.0) {
  safety::ActorState a;
  a.x = x;
  a.y = y;
  a.speed = speed;
  a.acceleration = accel;
  a.length = length;
  return a;
}

traj::TrajectorySample sample(double t, double x, double y, double speed, double accel,
                              double length = 4.0) {
  traj::TrajectorySample s;
  s.vehicle_id = "m";
  s.timestamp = t;
  s.x = x;
  s.y = y;
  s.lane_id = 1;
  s.speed = speed;
  s.acceleration = accel;
  s.length = length;
  s.width = 1.8;
  return s;
}

// Five merging-vehicle samples at y = 0,10,..,40 with accelerations 1..5 and
// the lane change at index 2.
traj::ScenarioWindow five_sample_window() {
  traj::ScenarioWindow w;
  w.event.vehicle_id = "m";
  w.event.event_index = 2;
  w.event.from_lane = 2;
  w.event.to_lane = 1;
  w.event.event_time = 0.2;
  for (int i = 0; i < 5; ++i) {
    w.m_samples.push_back(sample(i * 0.1, 0.0, i * 10.0, 10.0, i + 1.0));
  }
  return w;
}

traj::NeighborSamples follower_at(const std::vector<double>& ys, double length = 4.0) {
  traj::NeighborSamples n;
  n.vehicle_id = "f";
  for (std::size_t i = 0; i < ys.size(); ++i) {
    n.samples.emplace_back(sample(i * 0.1, 0.0, ys[i], 10.0, 0.0, length));
  }
  return n;
}

}  // namespace

TEST_CASE("heading arithmetic") {
  CHECK(bearing_degrees(10.0, 0.0) == doctest::Approx(0.0));
  CHECK(bearing_degrees(0.0, 10.0) == doctest::Approx(90.0));
  CHECK(bearing_degrees(-10.0, 0.0) == doctest::Approx(180.0));
  CHECK(normalize_heading(-350.0) == doctest::Approx(10.0));
  CHECK(normalize_heading(370.0) == doctest::Approx(10.0));
  CHECK(normalize_heading(360.0) == doctest::Approx(0.0));
  CHECK(heading_distance(359.0, 1.0) == doctest::Approx(2.0));
  CHECK(heading_distance(90.0, 270.0) == doctest::Approx(180.0));

  std::mt19937_64 rng(7);
  for (int i = 0; i < 1000; ++i) {
    const double a = draw_range(rng, -720.0, 720.0);
    const int k = draw_int(rng, -3, 3);
    CHECK(normalize_heading(a + 360.0 * k) == doctest::Approx(normalize_heading(a)).epsilon(1e-9));
  }
}

TEST_CASE("protective circle radius scales with speed") {
  CHECK(safety::speed_kmh(10.0) == doctest::Approx(36.0));
  CHECK(safety::merge_radius(actor(0, 0, 10.0, 4.0)) == doctest::Approx(3.6));
  CHECK(safety::merge_radius(actor(0, 0, 10.0, 4.0), 0.2) == doctest::Approx(7.2));
}

TEST_CASE("circle separation on pinned configurations") {
  // 10 m/s -> 3.6 m radius against a 4 m vehicle: clear at 20 m.
  CHECK(safety::circle_safe(actor(0, 0, 10.0, 4.0), actor(0, 20.0, 8.0, 4.0)));
  // 100 km/h -> 10 m radius against a 5 m vehicle: 8 m apart is a conflict.
  CHECK_FALSE(safety::circle_safe(actor(0, 0, 100.0 / 3.6, 4.5), actor(0, 8.0, 20.0, 5.0)));
  // Touching circles count as a conflict: radii 5 + 4 at exactly 9 m.
  CHECK_FALSE(safety::circle_safe(actor(0, 0, 50.0 / 3.6, 4.0), actor(9.0, 0.0, 10.0, 4.0)));
  CHECK(safety::circle_safe(actor(0, 0, 50.0 / 3.6, 4.0), actor(9.0 + 1e-9, 0.0, 10.0, 4.0)));
}

TEST_CASE("circle separation agrees with the squared-distance form") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 20000; ++i) {
    const auto m = actor(draw_range(rng, -50, 50), draw_range(rng, -50, 50),
                         draw_range(rng, 0, 40), draw_range(rng, 0.5, 6.0));
    const auto o = actor(draw_range(rng, -50, 50), draw_range(rng, -50, 50),
                         draw_range(rng, 0, 40), draw_range(rng, 0.5, 6.0));
    const double cf = draw_range(rng, 0.05, 0.25);
    CHECK(safety::circle_safe(m, o, cf) == oracle::circle_safe(m, o, cf));
  }
}

TEST_CASE("longitudinal gap rule") {
  // 20 m/s -> 7.2 m clearance; the merging vehicle is 4 m long at y = 0.
  const auto m = actor(0, 0, 20.0, 4.0);

  SUBCASE("wide gap accepted") {
    const auto p = actor(0, 35.0, 20.0, 6.0);   // rear edge 32 >= 2 + 7.2
    const auto f = actor(0, -35.0, 20.0, 4.0);  // front edge -33 + 7.2 <= -2
    CHECK(safety::gap_safe(m, p, f));
  }
  SUBCASE("close follower rejected") {
    const auto f = actor(0, -8.0, 20.0, 4.0);  // front edge -6 + 7.2 > -2
    CHECK_FALSE(safety::gap_safe(m, std::nullopt, f));
  }
  SUBCASE("close leader rejected") {
    const auto p = actor(0, 8.0, 20.0, 6.0);  // rear edge 5 < 2 + 7.2
    CHECK_FALSE(safety::gap_safe(m, p, std::nullopt));
  }
  SUBCASE("boundary is inclusive") {
    const auto p = actor(0, 12.2, 20.0, 6.0);  // rear edge 9.2 == 2 + 7.2
    CHECK(safety::gap_safe(m, p, std::nullopt));
  }
  SUBCASE("absent neighbours hold vacuously") {
    CHECK(safety::gap_safe(m, std::nullopt, std::nullopt));
  }
}

TEST_CASE("feature vector encodes absent neighbours as far-away placeholders") {
  const auto m = actor(1.0, 100.0, 12.0, 4.5, 0.3);

  SUBCASE("both present") {
    const auto p = actor(0.5, 120.0, 13.0, 5.0, -0.1);
    const auto f = actor(0.0, 80.0, 11.0, 4.0, 0.2);
    const auto x = labeler::feature_vector(m, p, f);
    CHECK(x[0] == 12.0);
    CHECK(x[1] == 0.3);
    CHECK(x[2] == 4.5);
    CHECK(x[3] == doctest::Approx(20.0));
    CHECK(x[4] == doctest::Approx(-0.5));
    CHECK(x[5] == 13.0);
    CHECK(x[6] == -0.1);
    CHECK(x[7] == 5.0);
    CHECK(x[8] == doctest::Approx(-20.0));
    CHECK(x[9] == doctest::Approx(-1.0));
    CHECK(x[10] == 11.0);
    CHECK(x[11] == 0.2);
    CHECK(x[12] == 4.0);
  }
  SUBCASE("both absent") {
    const auto x = labeler::feature_vector(m, std::nullopt, std::nullopt);
    CHECK(x[3] == labeler::kAbsentNeighborOffset);
    CHECK(x[4] == 0.0);
    CHECK(x[5] == 12.0);
    CHECK(x[6] == 0.0);
    CHECK(x[7] == 0.0);
    CHECK(x[8] == -labeler::kAbsentNeighborOffset);
    CHECK(x[10] == 12.0);
  }
}

TEST_CASE("merge point is the centre of the target gap, clamped by clearance") {
  traj::ScenarioWindow w;
  w.event.vehicle_id = "m";
  w.event.event_index = 0;
  w.event.from_lane = 2;
  w.event.to_lane = 1;
  w.event.event_time = 0.0;
  w.m_samples.push_back(sample(0.0, 1.0, 30.0, 10.0, 0.0, 4.0));

  traj::NeighborSamples p;
  p.vehicle_id = "p";
  traj::NeighborSamples f;
  f.vehicle_id = "f";

  SUBCASE("midpoint inside the admissible band") {
    p.samples.emplace_back(sample(0.0, 3.0, 53.0, 10.0, 0.0, 6.0));  // rear edge 50
    f.samples.emplace_back(sample(0.0, 1.0, 17.0, 10.0, 0.0, 6.0));  // front edge 20
    w.preceding = p;
    w.following = f;
    labeler::WindowLabeler lab(w);
    CHECK(lab.merge_point().x == doctest::Approx(2.0));
    CHECK(lab.merge_point().y == doctest::Approx(35.0));
    CHECK(lab.merge_point().index == 0);
  }
  SUBCASE("band tighter than the clearance keeps the raw midpoint") {
    p.samples.emplace_back(sample(0.0, 1.0, 33.0, 10.0, 0.0, 6.0));  // rear edge 30
    f.samples.emplace_back(sample(0.0, 1.0, 17.0, 10.0, 0.0, 6.0));  // front edge 20
    w.preceding = p;
    w.following = f;
    labeler::WindowLabeler lab(w);
    CHECK(lab.merge_point().y == doctest::Approx(25.0));
  }
  SUBCASE("missing neighbour anchors the point at the event position") {
    labeler::WindowLabeler lab(w);
    CHECK(lab.merge_point().x == doctest::Approx(1.0));
    CHECK(lab.merge_point().y == doctest::Approx(30.0));
  }
}

TEST_CASE("acceleration targets average toward the merge point") {
  const auto w = five_sample_window();
  labeler::WindowLabeler lab(w);

  // No neighbours: every sample is safe and the merge point sits at the event.
  for (bool m : lab.merge_labels()) CHECK(m);
  CHECK(lab.merge_point().index == 2);

  CHECK(lab.label_at(0).accel == doctest::Approx(2.0));  // mean of 1,2,3
  CHECK(lab.label_at(4).accel == doctest::Approx(4.0));  // mean of 3,4,5
  CHECK(lab.label_at(2).accel == doctest::Approx(3.0));
  CHECK_FALSE(lab.label_at(0).flagged);

  CHECK(lab.label_at(0).heading == doctest::Approx(90.0));   // toward +y
  CHECK(lab.label_at(4).heading == doctest::Approx(270.0));  // back toward the point
  // At the point itself the direction of travel takes over.
  CHECK(lab.label_at(2).heading == doctest::Approx(90.0));
}

TEST_CASE("unsafe samples aim at the first safe sample after them") {
  auto w = five_sample_window();
  // Follower glued to the bumper for the first two samples, then far behind.
  w.following = follower_at({-1.0, 9.0, -30.0, -20.0, -10.0});

  labeler::WindowLabeler lab(w);
  const auto& labels = lab.merge_labels();
  REQUIRE(labels.size() == 5);
  CHECK_FALSE(labels[0]);
  CHECK_FALSE(labels[1]);
  CHECK(labels[2]);
  CHECK(labels[3]);
  CHECK(labels[4]);

  const auto l0 = lab.label_at(0);
  CHECK(l0.accel == doctest::Approx(2.0));  // mean of 1,2,3 up to the first safe sample
  CHECK(l0.heading == doctest::Approx(90.0));  // toward the vehicle's own position at that sample
  CHECK_FALSE(l0.flagged);
}

TEST_CASE("samples with no safe successor are flagged and aim at the merge point") {
  auto w = five_sample_window();
  // Far behind early, glued to the bumper for the last two samples.
  w.following = follower_at({-30.0, -20.0, -10.0, 29.0, 39.0});

  labeler::WindowLabeler lab(w);
  const auto& labels = lab.merge_labels();
  CHECK(labels[0]);
  CHECK(labels[1]);
  CHECK(labels[2]);
  CHECK_FALSE(labels[3]);
  CHECK_FALSE(labels[4]);

  const auto l3 = lab.label_at(3);
  CHECK(l3.flagged);
  CHECK(l3.accel == doctest::Approx(4.5));     // mean of 4,5 to the window end
  CHECK(l3.heading == doctest::Approx(270.0));  // merge point is behind by then
}

TEST_CASE("a follower ahead of the merging vehicle forces a false label") {
  const auto windows = synth::random_windows(40, 11);
  std::size_t checked = 0;
  for (const auto& w : windows) {
    if (!w.following) continue;
    labeler::WindowLabeler lab(w);
    for (std::size_t i = 0; i < lab.size(); ++i) {
      const auto& slot = w.following->samples[i];
      if (!slot) continue;
      if (slot->y >= w.m_samples[i].y) {
        CHECK_FALSE(lab.merge_labels()[i]);
        ++checked;
      }
    }
  }
  // The generator produces some fast followers that overtake; make sure the
  // property was actually exercised.
  CHECK(checked > 0);
}

TEST_CASE("prefix-sum targets match loop averages on random windows") {
  const auto windows = synth::random_windows(200, 20240920);
  for (const auto& w : windows) {
    labeler::WindowLabeler lab(w);
    std::vector<double> accel;
    for (const auto& s : w.m_samples) accel.push_back(s.acceleration);
    const auto msp = static_cast<std::size_t>(lab.merge_point().index);
    for (std::size_t i = 0; i < lab.size(); ++i) {
      const auto expected = oracle::accel_target(i, lab.merge_labels(), msp, accel);
      const auto got = lab.label_at(i);
      CHECK(got.accel == doctest::Approx(expected.accel).epsilon(1e-9));
      CHECK(got.flagged == expected.flagged);
    }
  }
}

TEST_CASE("a wider clearance factor never adds true labels") {
  const auto windows = synth::random_windows(60, 31337);
  labeler::LabelerConfig narrow;
  narrow.clearance_factor = 0.1;
  labeler::LabelerConfig wide;
  wide.clearance_factor = 0.2;
  for (const auto& w : windows) {
    labeler::WindowLabeler lab_narrow(w, narrow);
    labeler::WindowLabeler lab_wide(w, wide);
    for (std::size_t i = 0; i < lab_narrow.size(); ++i) {
      if (lab_wide.merge_labels()[i]) CHECK(lab_narrow.merge_labels()[i]);
    }
  }
}

TEST_CASE("rounding helper rounds half away from zero") {
  CHECK(labeler::round_to(4.2637, 1) == doctest::Approx(4.3));
  CHECK(labeler::round_to(12.3456, 2) == doctest::Approx(12.35));
  CHECK(labeler::round_to(2.5, 0) == doctest::Approx(3.0));
  CHECK(labeler::round_to(-2.5, 0) == doctest::Approx(-3.0));
  CHECK(labeler::round_to(0.25, 1) == doctest::Approx(0.3));
}

TEST_CASE("dataset rows carry rounded features and targets") {
  const auto windows = synth::random_windows(3, 5);
  const auto rows = labeler::build_dataset(windows);
  REQUIRE(rows.size() == 3 * traj::kWindowSize);

  for (const auto& row : rows) {
    for (std::size_t k = 0; k < labeler::kFeatureCount; ++k) {
      const int decimals = (k == 3 || k == 4 || k == 8 || k == 9) ? 2 : 1;
      const double scaled = row.features[k] * (decimals == 2 ? 100.0 : 10.0);
      CHECK(scaled == doctest::Approx(std::round(scaled)).epsilon(1e-9));
    }
    CHECK(row.accel == doctest::Approx(std::round(row.accel)));
    CHECK(row.heading * 10.0 == doctest::Approx(std::round(row.heading * 10.0)).epsilon(1e-9));
    CHECK(row.heading >= 0.0);
    CHECK(row.heading < 360.0);
  }
}

TEST_CASE("dataset files round trip through the loader") {
  const auto windows = synth::random_windows(5, 77);
  const auto rows = labeler::build_dataset(windows);

  std::stringstream buffer;
  labeler::write_dataset_csv(buffer, rows);
  const auto table = ml::load_dataset_csv(buffer);

  REQUIRE(table.size() == rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < labeler::kFeatureCount; ++k) {
      CHECK(table.features[r][k] == rows[r].features[k]);
    }
    CHECK(table.merge[r] == (rows[r].merge ? 1 : 0));
    CHECK(table.accel[r] == rows[r].accel);
    CHECK(table.heading[r] == rows[r].heading);
    CHECK(table.flagged[r] == (rows[r].flagged ? 1 : 0));
  }
}

TEST_CASE("dataset loader rejects a mangled header or short rows") {
  {
    std::istringstream in("speed,accel\n1,2\n");
    CHECK_THROWS(ml::load_dataset_csv(in));
  }
  {
    std::stringstream buffer;
    buffer << labeler::kDatasetHeader << "\n1,2,3\n";
    CHECK_THROWS(ml::load_dataset_csv(buffer));
  }
}
