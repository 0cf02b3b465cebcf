#pragma once

#include <vector>

#include "lanemerge/tree.hpp"

namespace lanemerge::ml {

struct BoostingOptions {
  Task task = Task::regression;
  int n_estimators = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  std::size_t min_samples_split = 2;
};

// Stagewise additive trees. Regression fits each stage to the current
// residuals; binary classification (labels 0/1) fits trees to the logistic
// gradient and re-labels each leaf with a single Newton step.
class GradientBoosting {
 public:
  GradientBoosting() = default;
  explicit GradientBoosting(BoostingOptions options) : options_(options) {}

  void fit(const Dataset& d);

  // Regression: the predicted value. Classification: the 0/1 label.
  double predict(const std::vector<double>& x) const;
  // The raw additive score (log-odds for classification).
  double predict_score(const std::vector<double>& x) const;
  double predict_probability(const std::vector<double>& x) const;

  double base_score() const { return base_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }
  // Training loss after each stage: mean squared error for regression, mean
  // negative log-likelihood for classification.
  const std::vector<double>& stage_losses() const { return stage_losses_; }
  const BoostingOptions& options() const { return options_; }
  void set_state(double base, std::vector<DecisionTree> trees) {
    base_ = base;
    trees_ = std::move(trees);
  }

 private:
  BoostingOptions options_;
  double base_ = 0.0;
  std::vector<DecisionTree> trees_;
  std::vector<double> stage_losses_;
};

}  // namespace lanemerge::ml
