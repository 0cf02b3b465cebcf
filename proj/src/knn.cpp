#include "lanemerge/knn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace lanemerge::ml {

void KNearestNeighbors::fit(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  if (options_.k <= 0) throw std::invalid_argument("k must be positive");
  if (static_cast<std::size_t>(options_.k) > d.size()) {
    throw std::invalid_argument("k exceeds the number of training rows");
  }
  standardizer_ = Standardizer::fit(d);
  train_ = standardizer_.transform(d);
}

double KNearestNeighbors::predict(const std::vector<double>& x) const {
  if (train_.size() == 0) throw std::logic_error("predict before fit");

  const std::vector<double> q = standardizer_.transform(x);
  std::vector<std::pair<double, std::size_t>> by_distance(train_.size());
  for (std::size_t i = 0; i < train_.size(); ++i) {
    double d2 = 0.0;
    for (std::size_t f = 0; f < q.size(); ++f) {
      const double delta = train_.x[i][f] - q[f];
      d2 += delta * delta;
    }
    by_distance[i] = {d2, i};
  }

  const auto k = static_cast<std::size_t>(options_.k);
  std::nth_element(by_distance.begin(), by_distance.begin() + static_cast<std::ptrdiff_t>(k - 1),
                   by_distance.end());  // pair ordering breaks ties toward earlier rows

  if (options_.task == Task::regression) {
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += train_.y[by_distance[i].second];
    return sum / static_cast<double>(k);
  }

  std::map<double, int> votes;
  for (std::size_t i = 0; i < k; ++i) ++votes[train_.y[by_distance[i].second]];
  double best_label = 0.0;
  int best_votes = 0;
  for (const auto& [label, count] : votes) {
    if (count > best_votes) {
      best_votes = count;
      best_label = label;
    }
  }
  return best_label;
}

}  // namespace lanemerge::ml
