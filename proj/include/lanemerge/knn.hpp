#pragma once

#include <vector>

#include "lanemerge/dataset.hpp"

namespace lanemerge::ml {

struct KnnOptions {
  Task task = Task::classification;
  int k = 5;
};

// Exact k-nearest-neighbours over standardized features with Euclidean
// distance. Distance ties prefer the earlier training row.
class KNearestNeighbors {
 public:
  KNearestNeighbors() = default;
  explicit KNearestNeighbors(KnnOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;

  const KnnOptions& options() const { return options_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const Dataset& training_data() const { return train_; }
  void set_state(Standardizer s, Dataset standardized_train) {
    standardizer_ = std::move(s);
    train_ = std::move(standardized_train);
  }

 private:
  KnnOptions options_;
  Standardizer standardizer_;
  Dataset train_;  // stored standardized
};

}  // namespace lanemerge::ml
