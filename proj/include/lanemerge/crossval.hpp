#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lanemerge/model.hpp"

namespace lanemerge::ml {

struct CrossValResult {
  std::vector<double> fold_scores;
  double mean = 0.0;
  double stddev = 0.0;
};

// K-fold cross-validation. Classification folds are stratified by dealing
// each class round-robin after a seeded shuffle (every class needs at least
// `folds` rows); regression rows are shuffled and cut into contiguous chunks.
// Classification scores exact matches, regression scores tolerance hits.
CrossValResult cross_validate(const ModelSpec& spec, const Dataset& d, int folds,
                              std::uint64_t seed);

// Deals rows into `folds` buckets using the scheme above; exposed so callers
// can inspect fold membership.
std::vector<std::vector<std::size_t>> make_folds(const Dataset& d, Task task, int folds,
                                                 std::uint64_t seed);

struct SweepPoint {
  int value = 0;
  double train_score = 0.0;
  double validation_score = 0.0;
};

struct SweepResult {
  std::string parameter;  // "max_depth", "k" or "n_estimators"
  std::vector<SweepPoint> points;
  int chosen = 0;
  bool fallback = false;  // no value met the overfit gap, best validation used
};

// Overfitting gate in percentage points: the largest candidate whose
// train/validation gap stays within the budget wins.
double default_gap_points(Algorithm a);

SweepResult sweep_max_depth(const ModelSpec& base, const Dataset& train, const Dataset& validation,
                            const std::vector<int>& values, double gap_points);

// Picks the candidate with the best validation score (first on ties).
SweepResult sweep_estimators(const ModelSpec& base, const Dataset& train,
                             const Dataset& validation, const std::vector<int>& values);

void write_sweep_csv(std::ostream& out, const SweepResult& result);

double score_model(const Model& model, const Dataset& d, const ModelSpec& spec);

}  // namespace lanemerge::ml
