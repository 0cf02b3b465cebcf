#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "lanemerge/labeler.hpp"

namespace lanemerge::ml {

enum class Task { classification, regression };

struct Dataset {
  std::vector<std::vector<double>> x;
  std::vector<double> y;

  std::size_t size() const { return x.size(); }
  std::size_t feature_count() const { return x.empty() ? 0 : x.front().size(); }
};

std::map<double, std::size_t> class_counts(const Dataset& d);

// The labeled table as read back from a dataset file: one feature block plus
// all three targets per row.
struct LabeledTable {
  std::vector<std::array<double, labeler::kFeatureCount>> features;
  std::vector<int> merge;
  std::vector<double> accel;
  std::vector<double> heading;
  std::vector<int> flagged;

  std::size_t size() const { return features.size(); }
};

enum class LabelColumn { merge, accel, heading };

Dataset to_dataset(const LabeledTable& table, LabelColumn column);

LabeledTable load_dataset_csv(std::istream& in);
LabeledTable load_dataset_csv_file(const std::string& path);

struct SplitRatios {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  Dataset train;
  Dataset validation;
  Dataset test;
};

// Classification splits are stratified per class with largest-remainder
// rounding; a class that would vanish from a non-empty split is an error.
// Regression rows are shuffled and cut contiguously.
DatasetSplit split_dataset(const Dataset& d, const SplitRatios& ratios, Task task,
                           std::uint64_t seed);

// Per-feature zero-mean unit-variance scaling; constant features are centred
// but not scaled, so they cannot blow up the transform.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Standardizer fit(const Dataset& d);
  std::vector<double> transform(const std::vector<double>& row) const;
  Dataset transform(const Dataset& d) const;
};

}  // namespace lanemerge::ml
