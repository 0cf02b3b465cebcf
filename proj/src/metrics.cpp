#include "lanemerge/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "lanemerge/heading.hpp"

namespace lanemerge::ml {

namespace {

void check_sizes(const std::vector<double>& predictions, const std::vector<double>& labels) {
  if (predictions.empty()) throw std::invalid_argument("no predictions to score");
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
}

}  // namespace

double exact_match_accuracy(const std::vector<double>& predictions,
                            const std::vector<double>& labels) {
  check_sizes(predictions, labels);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i] == labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double tolerance_accuracy(const std::vector<double>& predictions,
                          const std::vector<double>& labels, double tolerance, bool angular) {
  check_sizes(predictions, labels);
  if (tolerance < 0.0) throw std::invalid_argument("tolerance must be non-negative");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double diff = angular ? heading_distance(predictions[i], labels[i])
                                : std::fabs(predictions[i] - labels[i]);
    if (diff <= tolerance) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double mean_squared_error(const std::vector<double>& predictions,
                          const std::vector<double>& labels) {
  check_sizes(predictions, labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - labels[i];
    sum += e * e;
  }
  return sum / static_cast<double>(predictions.size());
}

}  // namespace lanemerge::ml
