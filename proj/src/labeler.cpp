#include "lanemerge/labeler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "lanemerge/heading.hpp"

namespace lanemerge::labeler {

namespace {

constexpr double kCoincidentEpsilon = 1e-9;

std::optional<safety::ActorState> actor_opt(const std::optional<traj::TrajectorySample>& s) {
  if (!s) return std::nullopt;
  return actor_from(*s);
}

}  // namespace

safety::ActorState actor_from(const traj::TrajectorySample& s) {
  safety::ActorState a;
  a.x = s.x;
  a.y = s.y;
  a.speed = s.speed;
  a.acceleration = s.acceleration;
  a.length = s.length;
  return a;
}

std::array<double, kFeatureCount> feature_vector(const safety::ActorState& m,
                                                 const std::optional<safety::ActorState>& preceding,
                                                 const std::optional<safety::ActorState>& following) {
  std::array<double, kFeatureCount> f{};
  f[0] = m.speed;
  f[1] = m.acceleration;
  f[2] = m.length;
  if (preceding) {
    f[3] = preceding->y - m.y;
    f[4] = preceding->x - m.x;
    f[5] = preceding->speed;
    f[6] = preceding->acceleration;
    f[7] = preceding->length;
  } else {
    f[3] = kAbsentNeighborOffset;
    f[4] = 0.0;
    f[5] = m.speed;
    f[6] = 0.0;
    f[7] = 0.0;
  }
  if (following) {
    f[8] = following->y - m.y;
    f[9] = following->x - m.x;
    f[10] = following->speed;
    f[11] = following->acceleration;
    f[12] = following->length;
  } else {
    f[8] = -kAbsentNeighborOffset;
    f[9] = 0.0;
    f[10] = m.speed;
    f[11] = 0.0;
    f[12] = 0.0;
  }
  return f;
}

WindowLabeler::WindowLabeler(const traj::ScenarioWindow& window, LabelerConfig config)
    : config_(config) {
  const std::size_t n = window.m_samples.size();
  if (n == 0) throw std::invalid_argument("empty scenario window");

  m_.reserve(n);
  preceding_.resize(n);
  following_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    m_.push_back(actor_from(window.m_samples[i]));
    if (window.preceding && i < window.preceding->samples.size()) {
      preceding_[i] = actor_opt(window.preceding->samples[i]);
    }
    if (window.following && i < window.following->samples.size()) {
      following_[i] = actor_opt(window.following->samples[i]);
    }
  }

  merge_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    bool safe = safety::gap_safe(m_[i], preceding_[i], following_[i], config_.clearance_factor);
    if (safe && preceding_[i]) {
      safe = safety::circle_safe(m_[i], *preceding_[i], config_.clearance_factor);
    }
    if (safe && following_[i]) {
      safe = safety::circle_safe(m_[i], *following_[i], config_.clearance_factor);
    }
    merge_[i] = safe;
  }

  first_true_at_.assign(n, -1);
  int next_true = -1;
  for (std::size_t k = n; k-- > 0;) {
    if (merge_[k]) next_true = static_cast<int>(k);
    first_true_at_[k] = next_true;
  }

  accel_prefix_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) accel_prefix_[i + 1] = accel_prefix_[i] + m_[i].acceleration;

  const auto e = static_cast<std::size_t>(std::clamp(window.event_offset(), 0, static_cast<int>(n) - 1));
  const safety::ActorState& m_event = m_[e];
  double target_x = m_event.x;
  double target_y = m_event.y;
  if (preceding_[e] && following_[e]) {
    const safety::ActorState& p = *preceding_[e];
    const safety::ActorState& f = *following_[e];
    target_x = (p.x + f.x) / 2.0;
    target_y = (safety::rear_edge(p) + safety::front_edge(f)) / 2.0;
    const double clearance = config_.clearance_factor * safety::speed_kmh(m_event.speed);
    const double lo = safety::front_edge(f) + clearance + m_event.length / 2.0;
    const double hi = safety::rear_edge(p) - clearance - m_event.length / 2.0;
    if (lo <= hi) target_y = std::clamp(target_y, lo, hi);
  }

  merge_point_.x = target_x;
  merge_point_.y = target_y;
  merge_point_.index = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = m_[i].x - target_x;
    const double dy = m_[i].y - target_y;
    const double d2 = dx * dx + dy * dy;
    if (d2 < best) {
      best = d2;
      merge_point_.index = static_cast<int>(i);
    }
  }
}

double WindowLabeler::mean_accel(std::size_t first, std::size_t last) const {
  return (accel_prefix_[last + 1] - accel_prefix_[first]) / static_cast<double>(last - first + 1);
}

double WindowLabeler::heading_at(std::size_t i, double target_x, double target_y) const {
  const double dx = target_x - m_[i].x;
  const double dy = target_y - m_[i].y;
  if (std::hypot(dx, dy) > kCoincidentEpsilon) return bearing_degrees(dx, dy);

  // Already at the target: fall back to the direction of travel.
  if (i + 1 < m_.size()) {
    const double mx = m_[i + 1].x - m_[i].x;
    const double my = m_[i + 1].y - m_[i].y;
    if (std::hypot(mx, my) > kCoincidentEpsilon) return bearing_degrees(mx, my);
  }
  if (i > 0) {
    const double mx = m_[i].x - m_[i - 1].x;
    const double my = m_[i].y - m_[i - 1].y;
    if (std::hypot(mx, my) > kCoincidentEpsilon) return bearing_degrees(mx, my);
  }
  return 90.0;
}

SampleLabel WindowLabeler::label_at(std::size_t i) const {
  if (i >= m_.size()) throw std::out_of_range("sample index out of range");
  SampleLabel label;
  label.merge = merge_[i];

  const auto msp = static_cast<std::size_t>(merge_point_.index);
  if (merge_[i]) {
    label.accel = i <= msp ? mean_accel(i, msp) : mean_accel(msp, i);
    label.heading = heading_at(i, merge_point_.x, merge_point_.y);
  } else {
    const int j = first_true_at_[i];
    if (j >= 0) {
      label.accel = mean_accel(i, static_cast<std::size_t>(j));
      label.heading = heading_at(i, m_[static_cast<std::size_t>(j)].x, m_[static_cast<std::size_t>(j)].y);
    } else {
      label.accel = mean_accel(i, m_.size() - 1);
      label.heading = heading_at(i, merge_point_.x, merge_point_.y);
      label.flagged = true;
    }
  }
  return label;
}

std::array<double, kFeatureCount> WindowLabeler::features_at(std::size_t i) const {
  if (i >= m_.size()) throw std::out_of_range("sample index out of range");
  return feature_vector(m_[i], preceding_[i], following_[i]);
}

double round_to(double value, int decimals) {
  double factor = 1.0;
  for (int i = 0; i < decimals; ++i) factor *= 10.0;
  return static_cast<double>(std::llround(value * factor)) / factor;
}

std::vector<DatasetRow> build_dataset(const std::vector<traj::ScenarioWindow>& windows,
                                      LabelerConfig config) {
  // Relative positions keep two decimals; speeds, accelerations and lengths
  // keep one.
  static constexpr int kDecimals[kFeatureCount] = {1, 1, 1, 2, 2, 1, 1, 1, 2, 2, 1, 1, 1};

  std::vector<DatasetRow> rows;
  for (const auto& window : windows) {
    WindowLabeler labeler(window, config);
    for (std::size_t i = 0; i < labeler.size(); ++i) {
      DatasetRow row;
      row.features = labeler.features_at(i);
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        row.features[k] = round_to(row.features[k], kDecimals[k]);
      }
      const SampleLabel label = labeler.label_at(i);
      row.merge = label.merge;
      row.accel = round_to(label.accel, 0);
      row.heading = round_to(label.heading, 1);
      row.flagged = label.flagged;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

const char* const kDatasetHeader =
    "speed_m,accel_m,length_m,dy_p,dx_p,speed_p,accel_p,length_p,"
    "dy_f,dx_f,speed_f,accel_f,length_f,merge,accel,heading,flagged";

void write_dataset_csv(std::ostream& out, const std::vector<DatasetRow>& rows) {
  out << kDatasetHeader << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (double f : row.features) {
      std::snprintf(buf, sizeof buf, "%.10g", f);
      out << buf << ',';
    }
    out << (row.merge ? 1 : 0) << ',';
    std::snprintf(buf, sizeof buf, "%.10g", row.accel);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.10g", row.heading);
    out << buf << ',' << (row.flagged ? 1 : 0) << '\n';
  }
}

void write_dataset_csv_file(const std::string& path, const std::vector<DatasetRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_dataset_csv(out, rows);
}

}  // namespace lanemerge::labeler
