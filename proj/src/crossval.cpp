#include "lanemerge/crossval.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

#include "lanemerge/metrics.hpp"
#include "lanemerge/rng.hpp"

namespace lanemerge::ml {

double score_model(const Model& model, const Dataset& d, const ModelSpec& spec) {
  const auto predictions = predict_all(model, d);
  if (spec.task == Task::classification) return exact_match_accuracy(predictions, d.y);
  return tolerance_accuracy(predictions, d.y, spec.tolerance, spec.angular);
}

std::vector<std::vector<std::size_t>> make_folds(const Dataset& d, Task task, int folds,
                                                 std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least two folds");
  if (d.size() < static_cast<std::size_t>(folds)) {
    throw std::invalid_argument("fewer rows than folds");
  }

  std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(folds));
  std::mt19937_64 rng(seed);

  if (task == Task::classification) {
    std::map<double, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.y[i]].push_back(i);
    for (auto& [label, rows] : by_class) {
      if (rows.size() < static_cast<std::size_t>(folds)) {
        throw std::runtime_error("class with too few rows for " + std::to_string(folds) +
                                 " folds");
      }
      shuffle_in_place(rows, rng);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        buckets[i % static_cast<std::size_t>(folds)].push_back(rows[i]);
      }
    }
  } else {
    auto rows = shuffled_indices(d.size(), rng);
    const std::size_t base = d.size() / static_cast<std::size_t>(folds);
    const std::size_t extra = d.size() % static_cast<std::size_t>(folds);
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < buckets.size(); ++f) {
      const std::size_t take = base + (f < extra ? 1 : 0);
      for (std::size_t k = 0; k < take; ++k) buckets[f].push_back(rows[cursor++]);
    }
  }
  return buckets;
}

CrossValResult cross_validate(const ModelSpec& spec, const Dataset& d, int folds,
                              std::uint64_t seed) {
  const auto buckets = make_folds(d, spec.task, folds, seed);

  CrossValResult result;
  for (std::size_t f = 0; f < buckets.size(); ++f) {
    Dataset train, held_out;
    for (std::size_t g = 0; g < buckets.size(); ++g) {
      Dataset& target = g == f ? held_out : train;
      for (std::size_t row : buckets[g]) {
        target.x.push_back(d.x[row]);
        target.y.push_back(d.y[row]);
      }
    }
    const auto model = fit_model(spec, train);
    result.fold_scores.push_back(score_model(*model, held_out, spec));
  }

  for (double s : result.fold_scores) result.mean += s;
  result.mean /= static_cast<double>(result.fold_scores.size());
  double var = 0.0;
  for (double s : result.fold_scores) var += (s - result.mean) * (s - result.mean);
  result.stddev = std::sqrt(var / static_cast<double>(result.fold_scores.size()));
  return result;
}

double default_gap_points(Algorithm a) {
  switch (a) {
    case Algorithm::random_forest:
      return 1.5;
    case Algorithm::decision_tree:
      return 1.0;
    default:
      return 1.5;
  }
}

namespace {

ModelSpec with_capacity(const ModelSpec& base, int value) {
  ModelSpec spec = base;
  if (base.algorithm == Algorithm::knn) {
    spec.hp.k_neighbors = value;
  } else {
    spec.hp.max_depth = value;
  }
  return spec;
}

}  // namespace

SweepResult sweep_max_depth(const ModelSpec& base, const Dataset& train, const Dataset& validation,
                            const std::vector<int>& values, double gap_points) {
  if (values.empty()) throw std::invalid_argument("no sweep values given");
  SweepResult result;
  result.parameter = base.algorithm == Algorithm::knn ? "k" : "max_depth";

  for (int value : values) {
    const ModelSpec spec = with_capacity(base, value);
    const auto model = fit_model(spec, train);
    SweepPoint point;
    point.value = value;
    point.train_score = score_model(*model, train, spec);
    point.validation_score = score_model(*model, validation, spec);
    result.points.push_back(point);
  }

  // Largest capacity whose train/validation gap stays inside the budget.
  bool found = false;
  for (const auto& point : result.points) {
    const double gap = (point.train_score - point.validation_score) * 100.0;
    if (gap <= gap_points && (!found || point.value > result.chosen)) {
      result.chosen = point.value;
      found = true;
    }
  }
  if (!found) {
    result.fallback = true;
    double best = -1.0;
    for (const auto& point : result.points) {
      if (point.validation_score > best) {
        best = point.validation_score;
        result.chosen = point.value;
      }
    }
  }
  return result;
}

SweepResult sweep_estimators(const ModelSpec& base, const Dataset& train,
                             const Dataset& validation, const std::vector<int>& values) {
  if (values.empty()) throw std::invalid_argument("no sweep values given");
  SweepResult result;
  result.parameter = "n_estimators";

  double best = -1.0;
  for (int value : values) {
    ModelSpec spec = base;
    spec.hp.n_estimators = value;
    const auto model = fit_model(spec, train);
    SweepPoint point;
    point.value = value;
    point.train_score = score_model(*model, train, spec);
    point.validation_score = score_model(*model, validation, spec);
    result.points.push_back(point);
    if (point.validation_score > best) {
      best = point.validation_score;
      result.chosen = value;
    }
  }
  return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
  out << result.parameter << ",train_score,validation_score,chosen\n";
  for (const auto& point : result.points) {
    out << point.value << ',' << point.train_score << ',' << point.validation_score << ','
        << (point.value == result.chosen ? 1 : 0) << '\n';
  }
}

}  // namespace lanemerge::ml
