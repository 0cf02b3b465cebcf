#include "lanemerge/model.hpp"

#include <stdexcept>

namespace lanemerge::ml {

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::decision_tree: return "decision-tree";
    case Algorithm::random_forest: return "random-forest";
    case Algorithm::gradient_boosting: return "gradient-boosting";
    case Algorithm::knn: return "knn";
    case Algorithm::logistic_regression: return "logistic-regression";
    case Algorithm::linear_svm: return "linear-svm";
    case Algorithm::perceptron: return "perceptron";
    case Algorithm::sgd_logistic: return "sgd-logistic";
    case Algorithm::naive_bayes: return "naive-bayes";
    case Algorithm::linear_regression: return "linear-regression";
  }
  return "unknown";
}

std::optional<Algorithm> algorithm_from_string(std::string_view name) {
  for (Algorithm a : {Algorithm::decision_tree, Algorithm::random_forest,
                      Algorithm::gradient_boosting, Algorithm::knn,
                      Algorithm::logistic_regression, Algorithm::linear_svm,
                      Algorithm::perceptron, Algorithm::sgd_logistic, Algorithm::naive_bayes,
                      Algorithm::linear_regression}) {
    if (name == to_string(a)) return a;
  }
  return std::nullopt;
}

const char* to_string(Task t) {
  return t == Task::classification ? "classification" : "regression";
}

std::optional<Task> task_from_string(std::string_view name) {
  if (name == "classification") return Task::classification;
  if (name == "regression") return Task::regression;
  return std::nullopt;
}

bool supports_task(Algorithm a, Task t) {
  switch (a) {
    case Algorithm::decision_tree:
    case Algorithm::random_forest:
    case Algorithm::gradient_boosting:
    case Algorithm::knn:
      return true;
    case Algorithm::logistic_regression:
    case Algorithm::linear_svm:
    case Algorithm::perceptron:
    case Algorithm::sgd_logistic:
    case Algorithm::naive_bayes:
      return t == Task::classification;
    case Algorithm::linear_regression:
      return t == Task::regression;
  }
  return false;
}

bool sweeps_depth(Algorithm a) {
  switch (a) {
    case Algorithm::decision_tree:
    case Algorithm::random_forest:
    case Algorithm::gradient_boosting:
    case Algorithm::knn:
      return true;
    default:
      return false;
  }
}

bool sweeps_estimators(Algorithm a) {
  return a == Algorithm::random_forest || a == Algorithm::gradient_boosting;
}

std::unique_ptr<Model> fit_model(const ModelSpec& spec, const Dataset& train) {
  if (!supports_task(spec.algorithm, spec.task)) {
    throw std::invalid_argument(std::string(to_string(spec.algorithm)) + " does not support " +
                                to_string(spec.task));
  }
  const Hyperparameters& hp = spec.hp;

  switch (spec.algorithm) {
    case Algorithm::decision_tree: {
      auto m = std::make_unique<TreeModel>();
      m->task_kind = spec.task;
      TreeOptions o;
      o.task = spec.task;
      o.max_depth = hp.max_depth > 0 ? hp.max_depth : 16;
      m->tree = DecisionTree(o);
      m->tree.fit(train);
      return m;
    }
    case Algorithm::random_forest: {
      auto m = std::make_unique<ForestModel>();
      ForestOptions o;
      o.task = spec.task;
      o.max_depth = hp.max_depth > 0 ? hp.max_depth : 16;
      o.n_estimators = hp.n_estimators > 0 ? hp.n_estimators : 100;
      o.seed = hp.seed;
      m->forest = RandomForest(o);
      m->forest.fit(train);
      return m;
    }
    case Algorithm::gradient_boosting: {
      auto m = std::make_unique<BoostingModel>();
      BoostingOptions o;
      o.task = spec.task;
      o.max_depth = hp.max_depth > 0 ? hp.max_depth : 3;
      o.n_estimators = hp.n_estimators > 0 ? hp.n_estimators : 100;
      o.learning_rate = hp.learning_rate > 0.0 ? hp.learning_rate : 0.1;
      m->boosting = GradientBoosting(o);
      m->boosting.fit(train);
      return m;
    }
    case Algorithm::knn: {
      auto m = std::make_unique<KnnModel>();
      KnnOptions o;
      o.task = spec.task;
      o.k = hp.k_neighbors > 0 ? hp.k_neighbors : 5;
      m->knn = KNearestNeighbors(o);
      m->knn.fit(train);
      return m;
    }
    case Algorithm::logistic_regression: {
      auto m = std::make_unique<LogisticModel>();
      m->classifier.fit(train);
      return m;
    }
    case Algorithm::linear_svm: {
      auto m = std::make_unique<SvmModel>();
      LinearSvmOptions o;
      if (hp.learning_rate > 0.0) o.eta0 = hp.learning_rate;
      o.seed = hp.seed;
      m->classifier = LinearSvm(o);
      m->classifier.fit(train);
      return m;
    }
    case Algorithm::perceptron: {
      auto m = std::make_unique<PerceptronModel>();
      m->classifier.fit(train);
      return m;
    }
    case Algorithm::sgd_logistic: {
      auto m = std::make_unique<SgdLogisticModel>();
      SgdLogisticOptions o;
      if (hp.learning_rate > 0.0) o.eta0 = hp.learning_rate;
      o.seed = hp.seed;
      m->classifier = SgdLogisticRegression(o);
      m->classifier.fit(train);
      return m;
    }
    case Algorithm::naive_bayes: {
      auto m = std::make_unique<NaiveBayesModel>();
      m->classifier.fit(train);
      return m;
    }
    case Algorithm::linear_regression: {
      auto m = std::make_unique<LinearRegressionWrapper>();
      m->regressor.fit(train);
      return m;
    }
  }
  throw std::logic_error("unhandled algorithm");
}

std::vector<double> predict_all(const Model& model, const Dataset& d) {
  std::vector<double> out;
  out.reserve(d.size());
  for (const auto& row : d.x) out.push_back(model.predict(row));
  return out;
}

}  // namespace lanemerge::ml
