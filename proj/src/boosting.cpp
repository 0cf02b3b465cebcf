#include "lanemerge/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lanemerge::ml {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double clamp_probability(double p) { return std::clamp(p, 1e-12, 1.0 - 1e-12); }

}  // namespace

void GradientBoosting::fit(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  if (options_.n_estimators <= 0) throw std::invalid_argument("boosting needs at least one stage");

  const std::size_t n = d.size();
  trees_.clear();
  stage_losses_.clear();

  TreeOptions tree_options;
  tree_options.task = Task::regression;  // every stage fits residuals
  tree_options.max_depth = options_.max_depth;
  tree_options.min_samples_split = options_.min_samples_split;

  Dataset residuals;
  residuals.x = d.x;
  residuals.y.resize(n);

  if (options_.task == Task::regression) {
    double mean = 0.0;
    for (double y : d.y) mean += y;
    base_ = mean / static_cast<double>(n);

    std::vector<double> score(n, base_);
    for (int m = 0; m < options_.n_estimators; ++m) {
      for (std::size_t i = 0; i < n; ++i) residuals.y[i] = d.y[i] - score[i];

      DecisionTree tree(tree_options);
      tree.fit(residuals);
      for (std::size_t i = 0; i < n; ++i) {
        score[i] += options_.learning_rate * tree.predict(d.x[i]);
      }
      trees_.push_back(std::move(tree));

      double loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double e = d.y[i] - score[i];
        loss += e * e;
      }
      stage_losses_.push_back(loss / static_cast<double>(n));
    }
    return;
  }

  for (double y : d.y) {
    if (y != 0.0 && y != 1.0) {
      throw std::invalid_argument("boosted classification expects 0/1 labels");
    }
  }

  double positive = 0.0;
  for (double y : d.y) positive += y;
  const double prior = clamp_probability(positive / static_cast<double>(n));
  base_ = std::log(prior / (1.0 - prior));

  std::vector<double> score(n, base_);
  std::vector<double> probability(n);
  for (int m = 0; m < options_.n_estimators; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      probability[i] = sigmoid(score[i]);
      residuals.y[i] = d.y[i] - probability[i];
    }

    DecisionTree tree(tree_options);
    tree.fit(residuals);

    // One Newton step per leaf: gamma = sum(residual) / sum(p (1 - p)).
    std::map<int, std::pair<double, double>> leaf_stats;
    std::vector<int> leaf(n);
    for (std::size_t i = 0; i < n; ++i) {
      leaf[i] = tree.leaf_of(d.x[i]);
      auto& [num, den] = leaf_stats[leaf[i]];
      num += residuals.y[i];
      den += probability[i] * (1.0 - probability[i]);
    }
    auto& nodes = tree.mutable_nodes();
    for (auto& [leaf_idx, stats] : leaf_stats) {
      const auto& [num, den] = stats;
      nodes[static_cast<std::size_t>(leaf_idx)].value = num / std::max(den, 1e-12);
    }

    for (std::size_t i = 0; i < n; ++i) {
      score[i] += options_.learning_rate * nodes[static_cast<std::size_t>(leaf[i])].value;
    }
    trees_.push_back(std::move(tree));

    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = clamp_probability(sigmoid(score[i]));
      loss -= d.y[i] > 0.5 ? std::log(p) : std::log(1.0 - p);
    }
    stage_losses_.push_back(loss / static_cast<double>(n));
  }
}

double GradientBoosting::predict_score(const std::vector<double>& x) const {
  if (trees_.empty()) throw std::logic_error("predict before fit");
  double score = base_;
  for (const auto& tree : trees_) score += options_.learning_rate * tree.predict(x);
  return score;
}

double GradientBoosting::predict_probability(const std::vector<double>& x) const {
  if (options_.task != Task::classification) {
    throw std::logic_error("probabilities are only defined for classification");
  }
  return sigmoid(predict_score(x));
}

double GradientBoosting::predict(const std::vector<double>& x) const {
  const double score = predict_score(x);
  if (options_.task == Task::regression) return score;
  return score >= 0.0 ? 1.0 : 0.0;
}

}  // namespace lanemerge::ml
