#pragma once

#include <vector>

#include "lanemerge/dataset.hpp"

namespace lanemerge::ml {

// Gaussian naive Bayes with class priors taken from training frequencies.
// Per-feature variances are floored to keep the densities finite.
class GaussianNaiveBayes {
 public:
  struct ClassModel {
    double label = 0.0;
    double log_prior = 0.0;
    std::vector<double> mean;
    std::vector<double> variance;
  };

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;
  double log_joint(const std::vector<double>& x, const ClassModel& c) const;

  const std::vector<ClassModel>& classes() const { return classes_; }
  std::vector<ClassModel>& mutable_classes() { return classes_; }

  static constexpr double kVarianceFloor = 1e-9;

 private:
  std::vector<ClassModel> classes_;
};

}  // namespace lanemerge::ml
