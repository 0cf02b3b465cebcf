#include "lanemerge/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "lanemerge/rng.hpp"

namespace lanemerge::ml {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double dot(const std::vector<double>& w, const std::vector<double>& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * x[i];
  return sum;
}

void check_binary(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  for (double y : d.y) {
    if (y != 0.0 && y != 1.0) throw std::invalid_argument("linear classifiers expect 0/1 labels");
  }
}

double log_loss(const Dataset& d, const std::vector<double>& w, double b) {
  double loss = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double p = std::clamp(sigmoid(dot(w, d.x[i]) + b), 1e-12, 1.0 - 1e-12);
    loss -= d.y[i] > 0.5 ? std::log(p) : std::log(1.0 - p);
  }
  return loss / static_cast<double>(d.size());
}

}  // namespace

void LinearRegressionModel::fit(const Dataset& d) {
  if (d.size() == 0) throw std::invalid_argument("empty training set");
  const auto n = static_cast<Eigen::Index>(d.size());
  const auto p = static_cast<Eigen::Index>(d.feature_count());

  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd y(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < p; ++c) x(r, c) = d.x[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    y(r) = d.y[static_cast<std::size_t>(r)];
  }

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  x.rowwise() -= x_mean;
  y.array() -= y_mean;

  const Eigen::MatrixXd gram = x.transpose() * x;
  const Eigen::VectorXd rhs = x.transpose() * y;

  Eigen::VectorXd w;
  bool solved = false;
  for (double ridge : {0.0, 1e-8, 1e-6, 1e-4, 1e-2}) {
    Eigen::MatrixXd system = gram;
    system.diagonal().array() += ridge;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(system);
    if (ldlt.info() != Eigen::Success) continue;
    w = ldlt.solve(rhs);
    if (w.allFinite()) {
      ridge_ = ridge;
      solved = true;
      break;
    }
  }
  if (!solved) throw std::runtime_error("least-squares solve failed");

  weights_.assign(w.data(), w.data() + w.size());
  intercept_ = y_mean - x_mean.dot(w);
}

double LinearRegressionModel::predict(const std::vector<double>& x) const {
  if (weights_.empty() && intercept_ == 0.0) throw std::logic_error("predict before fit");
  return dot(weights_, x) + intercept_;
}

void LogisticRegression::fit(const Dataset& d) {
  check_binary(d);
  standardizer_ = Standardizer::fit(d);
  const Dataset data = standardizer_.transform(d);
  const std::size_t n = data.size();
  const std::size_t p = data.feature_count();

  weights_.assign(p, 0.0);
  intercept_ = 0.0;
  iterations_ = 0;

  std::vector<double> grad(p);
  double loss = log_loss(data, weights_, intercept_);
  for (int iter = 0; iter < options_.max_iterations; ++iter) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double err = sigmoid(dot(weights_, data.x[i]) + intercept_) - data.y[i];
      for (std::size_t f = 0; f < p; ++f) grad[f] += err * data.x[i][f];
      grad_b += err;
    }
    for (double& g : grad) g /= static_cast<double>(n);
    grad_b /= static_cast<double>(n);

    double grad_sq = grad_b * grad_b;
    for (double g : grad) grad_sq += g * g;
    if (std::sqrt(grad_sq) <= options_.gradient_tolerance) break;

    // Armijo backtracking on the full-batch loss.
    double eta = 1.0;
    std::vector<double> next(p);
    double next_b = intercept_;
    double next_loss = loss;
    while (eta >= 1e-12) {
      for (std::size_t f = 0; f < p; ++f) next[f] = weights_[f] - eta * grad[f];
      next_b = intercept_ - eta * grad_b;
      next_loss = log_loss(data, next, next_b);
      if (next_loss <= loss - 1e-4 * eta * grad_sq) break;
      eta /= 2.0;
    }
    weights_ = next;
    intercept_ = next_b;
    loss = next_loss;
    ++iterations_;
  }
}

double LogisticRegression::predict_probability(const std::vector<double>& x) const {
  if (weights_.empty()) throw std::logic_error("predict before fit");
  return sigmoid(dot(weights_, standardizer_.transform(x)) + intercept_);
}

double LogisticRegression::predict(const std::vector<double>& x) const {
  return predict_probability(x) >= 0.5 ? 1.0 : 0.0;
}

void LogisticRegression::set_parameters(std::vector<double> weights, double intercept,
                                        Standardizer s) {
  weights_ = std::move(weights);
  intercept_ = intercept;
  standardizer_ = std::move(s);
}

void LinearSvm::fit(const Dataset& d) {
  check_binary(d);
  standardizer_ = Standardizer::fit(d);
  const Dataset data = standardizer_.transform(d);
  const std::size_t n = data.size();
  const std::size_t p = data.feature_count();

  weights_.assign(p, 0.0);
  intercept_ = 0.0;

  std::mt19937_64 rng(options_.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options_.epochs; ++epoch) {
    const auto order = shuffled_indices(n, rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = options_.eta0 / (1.0 + options_.eta0 * options_.lambda * static_cast<double>(t));
      const double y = data.y[i] > 0.5 ? 1.0 : -1.0;
      const double margin = y * (dot(weights_, data.x[i]) + intercept_);
      const double shrink = 1.0 - eta * options_.lambda;
      if (margin < 1.0) {
        for (std::size_t f = 0; f < p; ++f) {
          weights_[f] = shrink * weights_[f] + eta * y * data.x[i][f];
        }
        intercept_ += eta * y;
      } else {
        for (double& w : weights_) w *= shrink;
      }
    }
  }
}

double LinearSvm::decision_value(const std::vector<double>& x) const {
  if (weights_.empty()) throw std::logic_error("predict before fit");
  return dot(weights_, standardizer_.transform(x)) + intercept_;
}

double LinearSvm::predict(const std::vector<double>& x) const {
  return decision_value(x) >= 0.0 ? 1.0 : 0.0;
}

void LinearSvm::set_parameters(std::vector<double> weights, double intercept, Standardizer s) {
  weights_ = std::move(weights);
  intercept_ = intercept;
  standardizer_ = std::move(s);
}

void Perceptron::fit(const Dataset& d) {
  check_binary(d);
  standardizer_ = Standardizer::fit(d);
  const Dataset data = standardizer_.transform(d);
  const std::size_t p = data.feature_count();

  weights_.assign(p, 0.0);
  intercept_ = 0.0;
  converged_ = false;
  epochs_run_ = 0;

  for (int epoch = 0; epoch < options_.max_epochs; ++epoch) {
    std::size_t mistakes = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const double y = data.y[i] > 0.5 ? 1.0 : -1.0;
      if (y * (dot(weights_, data.x[i]) + intercept_) <= 0.0) {
        for (std::size_t f = 0; f < p; ++f) weights_[f] += y * data.x[i][f];
        intercept_ += y;
        ++mistakes;
      }
    }
    ++epochs_run_;
    if (mistakes == 0) {
      converged_ = true;
      break;
    }
  }
}

double Perceptron::predict(const std::vector<double>& x) const {
  if (weights_.empty()) throw std::logic_error("predict before fit");
  return dot(weights_, standardizer_.transform(x)) + intercept_ >= 0.0 ? 1.0 : 0.0;
}

void Perceptron::set_parameters(std::vector<double> weights, double intercept, Standardizer s) {
  weights_ = std::move(weights);
  intercept_ = intercept;
  standardizer_ = std::move(s);
}

void SgdLogisticRegression::fit(const Dataset& d) {
  check_binary(d);
  standardizer_ = Standardizer::fit(d);
  const Dataset data = standardizer_.transform(d);
  const std::size_t n = data.size();
  const std::size_t p = data.feature_count();

  weights_.assign(p, 0.0);
  intercept_ = 0.0;

  std::mt19937_64 rng(options_.seed);
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < options_.epochs; ++epoch) {
    const auto order = shuffled_indices(n, rng);
    for (std::size_t i : order) {
      ++t;
      const double eta = options_.eta0 / (1.0 + options_.eta0 * options_.lambda * static_cast<double>(t));
      const double err = sigmoid(dot(weights_, data.x[i]) + intercept_) - data.y[i];
      for (std::size_t f = 0; f < p; ++f) {
        weights_[f] -= eta * (err * data.x[i][f] + options_.lambda * weights_[f]);
      }
      intercept_ -= eta * err;
    }
  }
}

double SgdLogisticRegression::predict_probability(const std::vector<double>& x) const {
  if (weights_.empty()) throw std::logic_error("predict before fit");
  return sigmoid(dot(weights_, standardizer_.transform(x)) + intercept_);
}

double SgdLogisticRegression::predict(const std::vector<double>& x) const {
  return predict_probability(x) >= 0.5 ? 1.0 : 0.0;
}

void SgdLogisticRegression::set_parameters(std::vector<double> weights, double intercept,
                                           Standardizer s) {
  weights_ = std::move(weights);
  intercept_ = intercept;
  standardizer_ = std::move(s);
}

}  // namespace lanemerge::ml
