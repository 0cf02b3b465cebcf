#include "lanemerge/naive_bayes.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace lanemerge::ml {

void GaussianNaiveBayes::fit(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  const std::size_t p = d.feature_count();

  std::map<double, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < d.size(); ++i) by_class[d.y[i]].push_back(i);

  classes_.clear();
  for (const auto& [label, rows] : by_class) {
    ClassModel c;
    c.label = label;
    c.log_prior = std::log(static_cast<double>(rows.size()) / static_cast<double>(d.size()));
    c.mean.assign(p, 0.0);
    c.variance.assign(p, 0.0);

    for (std::size_t r : rows) {
      for (std::size_t f = 0; f < p; ++f) c.mean[f] += d.x[r][f];
    }
    for (std::size_t f = 0; f < p; ++f) c.mean[f] /= static_cast<double>(rows.size());

    for (std::size_t r : rows) {
      for (std::size_t f = 0; f < p; ++f) {
        const double delta = d.x[r][f] - c.mean[f];
        c.variance[f] += delta * delta;
      }
    }
    for (std::size_t f = 0; f < p; ++f) {
      c.variance[f] = std::max(c.variance[f] / static_cast<double>(rows.size()), kVarianceFloor);
    }
    classes_.push_back(std::move(c));
  }
}

double GaussianNaiveBayes::log_joint(const std::vector<double>& x, const ClassModel& c) const {
  double score = c.log_prior;
  for (std::size_t f = 0; f < x.size(); ++f) {
    const double delta = x[f] - c.mean[f];
    score -= 0.5 * (std::log(2.0 * M_PI * c.variance[f]) + delta * delta / c.variance[f]);
  }
  return score;
}

double GaussianNaiveBayes::predict(const std::vector<double>& x) const {
  if (classes_.empty()) throw std::logic_error("predict before fit");
  double best_label = classes_.front().label;
  double best_score = -std::numeric_limits<double>::infinity();
  for (const auto& c : classes_) {  // classes are sorted, so ties keep the smaller label
    const double score = log_joint(x, c);
    if (score > best_score) {
      best_score = score;
      best_label = c.label;
    }
  }
  return best_label;
}

}  // namespace lanemerge::ml
