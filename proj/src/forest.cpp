#include "lanemerge/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lanemerge/rng.hpp"

namespace lanemerge::ml {

std::size_t RandomForest::default_mtry(Task task, std::size_t n_features) {
  if (n_features == 0) return 0;
  std::size_t m;
  if (task == Task::classification) {
    m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))));
  } else {
    m = n_features / 3;
  }
  return std::max<std::size_t>(1, std::min(m, n_features));
}

void RandomForest::fit(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  if (options_.n_estimators <= 0) throw std::invalid_argument("forest needs at least one tree");

  const std::size_t mtry =
      options_.mtry > 0 ? options_.mtry : default_mtry(options_.task, d.feature_count());

  TreeOptions tree_options;
  tree_options.task = options_.task;
  tree_options.max_depth = options_.max_depth;
  tree_options.min_samples_split = options_.min_samples_split;

  trees_.assign(static_cast<std::size_t>(options_.n_estimators), DecisionTree(tree_options));
  std::vector<std::size_t> rows(d.size());
  for (std::size_t t = 0; t < trees_.size(); ++t) {
    std::mt19937_64 rng(mix_seed(options_.seed, t));
    if (options_.bootstrap) {
      for (std::size_t i = 0; i < d.size(); ++i) rows[i] = draw_index(rng, d.size());
    } else {
      std::iota(rows.begin(), rows.end(), std::size_t{0});
    }
    trees_[t].fit(d, rows, mtry >= d.feature_count() ? 0 : mtry, &rng);
  }
}

double RandomForest::predict(const std::vector<double>& x) const {
  if (trees_.empty()) throw std::logic_error("predict before fit");

  if (options_.task == Task::regression) {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict(x);
    return sum / static_cast<double>(trees_.size());
  }

  std::map<double, int> votes;
  for (const auto& tree : trees_) ++votes[tree.predict(x)];
  double best_label = 0.0;
  int best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {  // map order makes ties keep the smaller label
      best_votes = count;
      best_label = label;
    }
  }
  return best_label;
}

}  // namespace lanemerge::ml
