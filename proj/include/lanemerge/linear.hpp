#pragma once

#include <cstdint>
#include <vector>

#include "lanemerge/dataset.hpp"

namespace lanemerge::ml {

// Ordinary least squares solved by normal equations; if the system is
// singular the diagonal is inflated until the solve succeeds.
class LinearRegressionModel {
 public:
  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  double ridge_used() const { return ridge_; }
  void set_parameters(std::vector<double> weights, double intercept) {
    weights_ = std::move(weights);
    intercept_ = intercept;
  }

 private:
  std::vector<double> weights_;
  double intercept_ = 0.0;
  double ridge_ = 0.0;
};

struct LogisticRegressionOptions {
  int max_iterations = 5000;
  double gradient_tolerance = 1e-6;
};

// Full-batch gradient descent with Armijo backtracking on standardized
// features. Binary labels 0/1.
class LogisticRegression {
 public:
  LogisticRegression() = default;
  explicit LogisticRegression(LogisticRegressionOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;
  double predict_probability(const std::vector<double>& x) const;

  int iterations() const { return iterations_; }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_parameters(std::vector<double> weights, double intercept, Standardizer s);

 private:
  LogisticRegressionOptions options_;
  Standardizer standardizer_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
  int iterations_ = 0;
};

struct LinearSvmOptions {
  double lambda = 1e-4;
  double eta0 = 1.0;
  int epochs = 100;
  std::uint64_t seed = 42;
};

// Hinge-loss linear classifier trained by stochastic subgradient descent with
// the step schedule eta_t = eta0 / (1 + eta0 * lambda * t).
class LinearSvm {
 public:
  LinearSvm() = default;
  explicit LinearSvm(LinearSvmOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;
  double decision_value(const std::vector<double>& x) const;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_parameters(std::vector<double> weights, double intercept, Standardizer s);

 private:
  LinearSvmOptions options_;
  Standardizer standardizer_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
};

struct PerceptronOptions {
  int max_epochs = 1000;
};

// Rosenblatt perceptron: runs whole passes in row order until a pass makes no
// mistakes or the epoch budget runs out.
class Perceptron {
 public:
  Perceptron() = default;
  explicit Perceptron(PerceptronOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;

  bool converged() const { return converged_; }
  int epochs_run() const { return epochs_run_; }
  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_parameters(std::vector<double> weights, double intercept, Standardizer s);

 private:
  PerceptronOptions options_;
  Standardizer standardizer_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
  bool converged_ = false;
  int epochs_run_ = 0;
};

struct SgdLogisticOptions {
  double lambda = 1e-4;
  double eta0 = 1.0;
  int epochs = 50;
  std::uint64_t seed = 42;
};

// Logistic regression trained by per-sample stochastic gradient descent with
// L2 regularization; rows are reshuffled every epoch.
class SgdLogisticRegression {
 public:
  SgdLogisticRegression() = default;
  explicit SgdLogisticRegression(SgdLogisticOptions options) : options_(options) {}

  void fit(const Dataset& d);
  double predict(const std::vector<double>& x) const;
  double predict_probability(const std::vector<double>& x) const;

  const std::vector<double>& weights() const { return weights_; }
  double intercept() const { return intercept_; }
  const Standardizer& standardizer() const { return standardizer_; }
  void set_parameters(std::vector<double> weights, double intercept, Standardizer s);

 private:
  SgdLogisticOptions options_;
  Standardizer standardizer_;
  std::vector<double> weights_;
  double intercept_ = 0.0;
};

}  // namespace lanemerge::ml
