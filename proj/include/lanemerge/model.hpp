#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lanemerge/boosting.hpp"
#include "lanemerge/dataset.hpp"
#include "lanemerge/forest.hpp"
#include "lanemerge/knn.hpp"
#include "lanemerge/linear.hpp"
#include "lanemerge/naive_bayes.hpp"
#include "lanemerge/tree.hpp"

namespace lanemerge::ml {

enum class Algorithm {
  decision_tree,
  random_forest,
  gradient_boosting,
  knn,
  logistic_regression,
  linear_svm,
  perceptron,
  sgd_logistic,
  naive_bayes,
  linear_regression,
};

const char* to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(std::string_view name);
const char* to_string(Task t);
std::optional<Task> task_from_string(std::string_view name);

// Sentinel -1 (or non-positive) fields fall back to per-algorithm defaults.
struct Hyperparameters {
  int max_depth = -1;
  int n_estimators = -1;
  int k_neighbors = -1;
  double learning_rate = -1.0;
  std::uint64_t seed = 42;
};

struct ModelSpec {
  Algorithm algorithm = Algorithm::random_forest;
  Task task = Task::classification;
  Hyperparameters hp;
  double tolerance = 1.0;  // regression scoring band
  bool angular = false;    // treat predictions as headings when scoring
};

class Model {
 public:
  virtual ~Model() = default;
  virtual Algorithm algorithm() const = 0;
  virtual Task task() const = 0;
  virtual double predict(const std::vector<double>& x) const = 0;
};

struct TreeModel final : Model {
  Task task_kind = Task::classification;
  DecisionTree tree;
  Algorithm algorithm() const override { return Algorithm::decision_tree; }
  Task task() const override { return task_kind; }
  double predict(const std::vector<double>& x) const override { return tree.predict(x); }
};

struct ForestModel final : Model {
  RandomForest forest;
  Algorithm algorithm() const override { return Algorithm::random_forest; }
  Task task() const override { return forest.options().task; }
  double predict(const std::vector<double>& x) const override { return forest.predict(x); }
};

struct BoostingModel final : Model {
  GradientBoosting boosting;
  Algorithm algorithm() const override { return Algorithm::gradient_boosting; }
  Task task() const override { return boosting.options().task; }
  double predict(const std::vector<double>& x) const override { return boosting.predict(x); }
};

struct KnnModel final : Model {
  KNearestNeighbors knn;
  Algorithm algorithm() const override { return Algorithm::knn; }
  Task task() const override { return knn.options().task; }
  double predict(const std::vector<double>& x) const override { return knn.predict(x); }
};

struct LogisticModel final : Model {
  LogisticRegression classifier;
  Algorithm algorithm() const override { return Algorithm::logistic_regression; }
  Task task() const override { return Task::classification; }
  double predict(const std::vector<double>& x) const override { return classifier.predict(x); }
};

struct SvmModel final : Model {
  LinearSvm classifier;
  Algorithm algorithm() const override { return Algorithm::linear_svm; }
  Task task() const override { return Task::classification; }
  double predict(const std::vector<double>& x) const override { return classifier.predict(x); }
};

struct PerceptronModel final : Model {
  Perceptron classifier;
  Algorithm algorithm() const override { return Algorithm::perceptron; }
  Task task() const override { return Task::classification; }
  double predict(const std::vector<double>& x) const override { return classifier.predict(x); }
};

struct SgdLogisticModel final : Model {
  SgdLogisticRegression classifier;
  Algorithm algorithm() const override { return Algorithm::sgd_logistic; }
  Task task() const override { return Task::classification; }
  double predict(const std::vector<double>& x) const override { return classifier.predict(x); }
};

struct NaiveBayesModel final : Model {
  GaussianNaiveBayes classifier;
  Algorithm algorithm() const override { return Algorithm::naive_bayes; }
  Task task() const override { return Task::classification; }
  double predict(const std::vector<double>& x) const override { return classifier.predict(x); }
};

struct LinearRegressionWrapper final : Model {
  LinearRegressionModel regressor;
  Algorithm algorithm() const override { return Algorithm::linear_regression; }
  Task task() const override { return Task::regression; }
  double predict(const std::vector<double>& x) const override { return regressor.predict(x); }
};

// Resolves defaulted hyperparameters, checks the task is supported and trains
// the requested learner.
std::unique_ptr<Model> fit_model(const ModelSpec& spec, const Dataset& train);

std::vector<double> predict_all(const Model& model, const Dataset& d);

bool supports_task(Algorithm a, Task t);
bool sweeps_depth(Algorithm a);       // depth-style capacity parameter
bool sweeps_estimators(Algorithm a);  // ensemble size parameter

}  // namespace lanemerge::ml
