#pragma once

#include <cstdint>
#include <vector>

#include "lanemerge/tree.hpp"

namespace lanemerge::ml {

struct ForestOptions {
  Task task = Task::classification;
  int n_estimators = 100;
  int max_depth = 16;
  std::size_t mtry = 0;  // 0 -> sqrt(d) for classification, d/3 for regression
  bool bootstrap = true;
  std::size_t min_samples_split = 2;
  std::uint64_t seed = 42;
};

// Bagged trees with per-node feature subsampling. Each tree gets its own
// generator derived from the forest seed, so adding trees never disturbs the
// ones already grown.
class RandomForest {
 public:
  RandomForest() = default;
  explicit RandomForest(ForestOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;

  const std::vector<DecisionTree>& trees() const { return trees_; }
  const ForestOptions& options() const { return options_; }
  void set_trees(std::vector<DecisionTree> trees) { trees_ = std::move(trees); }

  static std::size_t default_mtry(Task task, std::size_t n_features);

 private:
  ForestOptions options_;
  std::vector<DecisionTree> trees_;
};

}  // namespace lanemerge::ml
