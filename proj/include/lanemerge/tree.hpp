#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lanemerge/dataset.hpp"

namespace lanemerge::ml {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  double value = 0.0;  // leaf prediction
  int left = -1;
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct TreeOptions {
  Task task = Task::classification;
  int max_depth = 16;  // depth of the root is 0
  std::size_t min_samples_split = 2;
};

// CART-style binary tree. Classification splits minimise Gini impurity,
// regression splits minimise within-node squared error; candidate thresholds
// are midpoints between consecutive distinct feature values and rows with
// x[feature] <= threshold go left.
class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(TreeOptions options) : options_(options) {}

  void fit(const Dataset& d);
  // Forest entry point: trains on the given rows only. When mtry is zero or
  // covers all features every feature is considered and rng is never touched;
  // otherwise each node draws mtry distinct candidate features from rng.
  void fit(const Dataset& d, const std::vector<std::size_t>& rows, std::size_t mtry,
           std::mt19937_64* rng);

  double predict(const std::vector<double>& x) const;
  int leaf_of(const std::vector<double>& x) const;

  int depth() const;
  int node_count() const { return static_cast<int>(nodes_.size()); }
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }
  const TreeOptions& options() const { return options_; }

 private:
  struct FitContext;
  int build(FitContext& ctx, std::vector<std::size_t>& rows, int depth);

  TreeOptions options_;
  std::vector<TreeNode> nodes_;
};

}  // namespace lanemerge::ml
