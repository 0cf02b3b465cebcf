#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lanemerge/safety.hpp"
#include "lanemerge/trajectory.hpp"

namespace lanemerge::labeler {

inline constexpr std::size_t kFeatureCount = 13;
inline constexpr double kAbsentNeighborOffset = 1e4;

struct LabelerConfig {
  double clearance_factor = safety::kDefaultClearanceFactor;
};

struct MergePoint {
  double x = 0.0;
  double y = 0.0;
  int index = 0;  // merging-vehicle sample closest to the point
};

struct SampleLabel {
  bool merge = false;
  double accel = 0.0;    // mean acceleration toward the merge point, m/s^2
  double heading = 0.0;  // bearing toward the target position, degrees
  bool flagged = false;  // no safe sample exists at or after this one
};

safety::ActorState actor_from(const traj::TrajectorySample& s);

// Feature layout: merging vehicle first, then the preceding and following
// target-lane vehicles as offsets relative to the merging vehicle. An absent
// neighbour is encoded as a far-away placeholder travelling at the merging
// vehicle's speed.
std::array<double, kFeatureCount> feature_vector(const safety::ActorState& m,
                                                 const std::optional<safety::ActorState>& preceding,
                                                 const std::optional<safety::ActorState>& following);

// Applies the geometric safety rules to every sample of a scenario window and
// derives the per-sample regression targets from the resulting merge labels.
class WindowLabeler {
 public:
  explicit WindowLabeler(const traj::ScenarioWindow& window, LabelerConfig config = {});

  std::size_t size() const { return merge_.size(); }
  const std::vector<bool>& merge_labels() const { return merge_; }
  const MergePoint& merge_point() const { return merge_point_; }
  SampleLabel label_at(std::size_t i) const;
  std::array<double, kFeatureCount> features_at(std::size_t i) const;

 private:
  double mean_accel(std::size_t first, std::size_t last) const;
  double heading_at(std::size_t i, double target_x, double target_y) const;

  LabelerConfig config_;
  std::vector<safety::ActorState> m_;
  std::vector<std::optional<safety::ActorState>> preceding_;
  std::vector<std::optional<safety::ActorState>> following_;
  std::vector<bool> merge_;
  std::vector<int> first_true_at_;  // -1 when no later sample is safe
  std::vector<double> accel_prefix_;
  MergePoint merge_point_;
};

struct DatasetRow {
  std::array<double, kFeatureCount> features{};
  bool merge = false;
  double accel = 0.0;
  double heading = 0.0;
  bool flagged = false;
};

double round_to(double value, int decimals);

std::vector<DatasetRow> build_dataset(const std::vector<traj::ScenarioWindow>& windows,
                                      LabelerConfig config = {});

extern const char* const kDatasetHeader;

void write_dataset_csv(std::ostream& out, const std::vector<DatasetRow>& rows);
void write_dataset_csv_file(const std::string& path, const std::vector<DatasetRow>& rows);

}  // namespace lanemerge::labeler
