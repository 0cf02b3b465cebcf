#include "lanemerge/model_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace lanemerge::ml {

namespace {

using nlohmann::json;

json nodes_to_json(const DecisionTree& tree) {
  json out = json::array();
  for (const auto& n : tree.nodes()) {
    out.push_back(json::array({n.feature, n.threshold, n.value, n.left, n.right}));
  }
  return out;
}

DecisionTree tree_from_json(const json& nodes, const TreeOptions& options) {
  DecisionTree tree(options);
  auto& out = tree.mutable_nodes();
  for (const auto& entry : nodes) {
    if (!entry.is_array() || entry.size() != 5) throw std::runtime_error("malformed tree node");
    TreeNode n;
    n.feature = entry[0].get<int>();
    n.threshold = entry[1].get<double>();
    n.value = entry[2].get<double>();
    n.left = entry[3].get<int>();
    n.right = entry[4].get<int>();
    out.push_back(n);
  }
  return tree;
}

json standardizer_to_json(const Standardizer& s) {
  return json{{"mean", s.mean}, {"stddev", s.stddev}};
}

Standardizer standardizer_from_json(const json& j) {
  Standardizer s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  return s;
}

json linear_params(const std::vector<double>& weights, double intercept, const Standardizer& s) {
  return json{{"weights", weights}, {"intercept", intercept},
              {"standardizer", standardizer_to_json(s)}};
}

json model_to_json(const Model& model) {
  json j;
  j["version"] = kModelFormatVersion;
  j["kind"] = to_string(model.algorithm());
  j["task"] = to_string(model.task());
  json hp = json::object();
  json params = json::object();

  switch (model.algorithm()) {
    case Algorithm::decision_tree: {
      const auto& m = static_cast<const TreeModel&>(model);
      hp["max_depth"] = m.tree.options().max_depth;
      params["nodes"] = nodes_to_json(m.tree);
      break;
    }
    case Algorithm::random_forest: {
      const auto& m = static_cast<const ForestModel&>(model);
      const auto& o = m.forest.options();
      hp["max_depth"] = o.max_depth;
      hp["n_estimators"] = o.n_estimators;
      hp["mtry"] = o.mtry;
      hp["bootstrap"] = o.bootstrap;
      hp["seed"] = o.seed;
      json trees = json::array();
      for (const auto& tree : m.forest.trees()) trees.push_back(nodes_to_json(tree));
      params["trees"] = std::move(trees);
      break;
    }
    case Algorithm::gradient_boosting: {
      const auto& m = static_cast<const BoostingModel&>(model);
      const auto& o = m.boosting.options();
      hp["max_depth"] = o.max_depth;
      hp["n_estimators"] = o.n_estimators;
      hp["learning_rate"] = o.learning_rate;
      params["base"] = m.boosting.base_score();
      json trees = json::array();
      for (const auto& tree : m.boosting.trees()) trees.push_back(nodes_to_json(tree));
      params["trees"] = std::move(trees);
      break;
    }
    case Algorithm::knn: {
      const auto& m = static_cast<const KnnModel&>(model);
      hp["k"] = m.knn.options().k;
      params["standardizer"] = standardizer_to_json(m.knn.standardizer());
      const Dataset& train = m.knn.training_data();
      params["x"] = train.x;
      params["y"] = train.y;
      break;
    }
    case Algorithm::logistic_regression: {
      const auto& m = static_cast<const LogisticModel&>(model);
      params = linear_params(m.classifier.weights(), m.classifier.intercept(),
                             m.classifier.standardizer());
      break;
    }
    case Algorithm::linear_svm: {
      const auto& m = static_cast<const SvmModel&>(model);
      params = linear_params(m.classifier.weights(), m.classifier.intercept(),
                             m.classifier.standardizer());
      break;
    }
    case Algorithm::perceptron: {
      const auto& m = static_cast<const PerceptronModel&>(model);
      params = linear_params(m.classifier.weights(), m.classifier.intercept(),
                             m.classifier.standardizer());
      break;
    }
    case Algorithm::sgd_logistic: {
      const auto& m = static_cast<const SgdLogisticModel&>(model);
      params = linear_params(m.classifier.weights(), m.classifier.intercept(),
                             m.classifier.standardizer());
      break;
    }
    case Algorithm::naive_bayes: {
      const auto& m = static_cast<const NaiveBayesModel&>(model);
      json classes = json::array();
      for (const auto& c : m.classifier.classes()) {
        classes.push_back(json{{"label", c.label},
                               {"log_prior", c.log_prior},
                               {"mean", c.mean},
                               {"variance", c.variance}});
      }
      params["classes"] = std::move(classes);
      break;
    }
    case Algorithm::linear_regression: {
      const auto& m = static_cast<const LinearRegressionWrapper&>(model);
      params["weights"] = m.regressor.weights();
      params["intercept"] = m.regressor.intercept();
      break;
    }
  }

  j["hyperparameters"] = std::move(hp);
  j["params"] = std::move(params);
  return j;
}

std::unique_ptr<Model> model_from_json(const json& j) {
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw std::runtime_error("unsupported model format version");
  }
  const auto algorithm = algorithm_from_string(j.at("kind").get<std::string>());
  if (!algorithm) throw std::runtime_error("unknown model kind: " + j.at("kind").get<std::string>());
  const auto task = task_from_string(j.at("task").get<std::string>());
  if (!task) throw std::runtime_error("unknown model task");

  const json& hp = j.at("hyperparameters");
  const json& params = j.at("params");

  switch (*algorithm) {
    case Algorithm::decision_tree: {
      auto m = std::make_unique<TreeModel>();
      m->task_kind = *task;
      TreeOptions o;
      o.task = *task;
      o.max_depth = hp.at("max_depth").get<int>();
      m->tree = tree_from_json(params.at("nodes"), o);
      return m;
    }
    case Algorithm::random_forest: {
      auto m = std::make_unique<ForestModel>();
      ForestOptions o;
      o.task = *task;
      o.max_depth = hp.at("max_depth").get<int>();
      o.n_estimators = hp.at("n_estimators").get<int>();
      o.mtry = hp.at("mtry").get<std::size_t>();
      o.bootstrap = hp.at("bootstrap").get<bool>();
      o.seed = hp.at("seed").get<std::uint64_t>();
      m->forest = RandomForest(o);
      TreeOptions to;
      to.task = *task;
      to.max_depth = o.max_depth;
      std::vector<DecisionTree> trees;
      for (const auto& entry : params.at("trees")) trees.push_back(tree_from_json(entry, to));
      m->forest.set_trees(std::move(trees));
      return m;
    }
    case Algorithm::gradient_boosting: {
      auto m = std::make_unique<BoostingModel>();
      BoostingOptions o;
      o.task = *task;
      o.max_depth = hp.at("max_depth").get<int>();
      o.n_estimators = hp.at("n_estimators").get<int>();
      o.learning_rate = hp.at("learning_rate").get<double>();
      m->boosting = GradientBoosting(o);
      TreeOptions to;
      to.task = Task::regression;
      to.max_depth = o.max_depth;
      std::vector<DecisionTree> trees;
      for (const auto& entry : params.at("trees")) trees.push_back(tree_from_json(entry, to));
      m->boosting.set_state(params.at("base").get<double>(), std::move(trees));
      return m;
    }
    case Algorithm::knn: {
      auto m = std::make_unique<KnnModel>();
      KnnOptions o;
      o.task = *task;
      o.k = hp.at("k").get<int>();
      m->knn = KNearestNeighbors(o);
      Dataset train;
      train.x = params.at("x").get<std::vector<std::vector<double>>>();
      train.y = params.at("y").get<std::vector<double>>();
      m->knn.set_state(standardizer_from_json(params.at("standardizer")), std::move(train));
      return m;
    }
    case Algorithm::logistic_regression: {
      auto m = std::make_unique<LogisticModel>();
      m->classifier.set_parameters(params.at("weights").get<std::vector<double>>(),
                                   params.at("intercept").get<double>(),
                                   standardizer_from_json(params.at("standardizer")));
      return m;
    }
    case Algorithm::linear_svm: {
      auto m = std::make_unique<SvmModel>();
      m->classifier.set_parameters(params.at("weights").get<std::vector<double>>(),
                                   params.at("intercept").get<double>(),
                                   standardizer_from_json(params.at("standardizer")));
      return m;
    }
    case Algorithm::perceptron: {
      auto m = std::make_unique<PerceptronModel>();
      m->classifier.set_parameters(params.at("weights").get<std::vector<double>>(),
                                   params.at("intercept").get<double>(),
                                   standardizer_from_json(params.at("standardizer")));
      return m;
    }
    case Algorithm::sgd_logistic: {
      auto m = std::make_unique<SgdLogisticModel>();
      m->classifier.set_parameters(params.at("weights").get<std::vector<double>>(),
                                   params.at("intercept").get<double>(),
                                   standardizer_from_json(params.at("standardizer")));
      return m;
    }
    case Algorithm::naive_bayes: {
      auto m = std::make_unique<NaiveBayesModel>();
      auto& classes = m->classifier.mutable_classes();
      for (const auto& entry : params.at("classes")) {
        GaussianNaiveBayes::ClassModel c;
        c.label = entry.at("label").get<double>();
        c.log_prior = entry.at("log_prior").get<double>();
        c.mean = entry.at("mean").get<std::vector<double>>();
        c.variance = entry.at("variance").get<std::vector<double>>();
        classes.push_back(std::move(c));
      }
      return m;
    }
    case Algorithm::linear_regression: {
      auto m = std::make_unique<LinearRegressionWrapper>();
      m->regressor.set_parameters(params.at("weights").get<std::vector<double>>(),
                                  params.at("intercept").get<double>());
      return m;
    }
  }
  throw std::logic_error("unhandled algorithm");
}

}  // namespace

void save_model(std::ostream& out, const Model& model) { out << model_to_json(model).dump() << '\n'; }

void save_model_file(const std::string& path, const Model& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open model file for writing: " + path);
  save_model(out, model);
}

std::unique_ptr<Model> load_model(std::istream& in) {
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed model file: ") + e.what());
  }
  return model_from_json(j);
}

std::unique_ptr<Model> load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  return load_model(in);
}

void save_bundle_file(const std::string& path, const ModelBundle& bundle) {
  if (!bundle.merge || !bundle.accel || !bundle.heading) {
    throw std::invalid_argument("bundle needs merge, accel and heading models");
  }
  if (bundle.merge->task() != Task::classification || bundle.accel->task() != Task::regression ||
      bundle.heading->task() != Task::regression) {
    throw std::invalid_argument("bundle model tasks do not match their roles");
  }
  json j;
  j["version"] = kModelFormatVersion;
  j["models"] = json{{"merge", model_to_json(*bundle.merge)},
                     {"accel", model_to_json(*bundle.accel)},
                     {"heading", model_to_json(*bundle.heading)}};
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open bundle file for writing: " + path);
  out << j.dump() << '\n';
}

ModelBundle load_bundle_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open bundle file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("malformed bundle file: ") + e.what());
  }
  if (j.at("version").get<int>() != kModelFormatVersion) {
    throw std::runtime_error("unsupported bundle format version");
  }
  const json& models = j.at("models");
  ModelBundle bundle;
  bundle.merge = model_from_json(models.at("merge"));
  bundle.accel = model_from_json(models.at("accel"));
  bundle.heading = model_from_json(models.at("heading"));
  if (bundle.merge->task() != Task::classification || bundle.accel->task() != Task::regression ||
      bundle.heading->task() != Task::regression) {
    throw std::runtime_error("bundle model tasks do not match their roles");
  }
  return bundle;
}

}  // namespace lanemerge::ml
