#include "lanemerge/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lanemerge/rng.hpp"

namespace lanemerge::ml {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_field(const std::string& token, std::size_t line_number) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end == token.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw std::runtime_error("dataset line " + std::to_string(line_number) +
                             ": bad numeric field '" + token + "'");
  }
  return v;
}

// Largest-remainder apportionment of n rows across the three splits.
std::array<std::size_t, 3> allocate_counts(std::size_t n, const SplitRatios& ratios) {
  const double r[3] = {ratios.train, ratios.validation, ratios.test};
  double total = 0.0;
  for (double v : r) {
    if (v < 0.0) throw std::invalid_argument("split ratios must be non-negative");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");

  std::array<std::size_t, 3> counts{};
  double frac[3];
  std::size_t used = 0;
  for (int k = 0; k < 3; ++k) {
    const double quota = static_cast<double>(n) * r[k];
    counts[k] = static_cast<std::size_t>(std::floor(quota));
    frac[k] = quota - static_cast<double>(counts[k]);
    used += counts[k];
  }
  for (std::size_t left = n - used; left > 0; --left) {
    int pick = 0;
    for (int k = 1; k < 3; ++k) {
      if (frac[k] > frac[pick]) pick = k;
    }
    ++counts[pick];
    frac[pick] = -1.0;
  }
  return counts;
}

void append_row(Dataset& d, const Dataset& src, std::size_t row) {
  d.x.push_back(src.x[row]);
  d.y.push_back(src.y[row]);
}

}  // namespace

std::map<double, std::size_t> class_counts(const Dataset& d) {
  std::map<double, std::size_t> counts;
  for (double label : d.y) ++counts[label];
  return counts;
}

Dataset to_dataset(const LabeledTable& table, LabelColumn column) {
  Dataset d;
  d.x.reserve(table.size());
  d.y.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    d.x.emplace_back(table.features[i].begin(), table.features[i].end());
    switch (column) {
      case LabelColumn::merge:
        d.y.push_back(static_cast<double>(table.merge[i]));
        break;
      case LabelColumn::accel:
        d.y.push_back(table.accel[i]);
        break;
      case LabelColumn::heading:
        d.y.push_back(table.heading[i]);
        break;
    }
  }
  return d;
}

LabeledTable load_dataset_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty dataset file");
  {
    std::string header = line;
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != labeler::kDatasetHeader) {
      throw std::runtime_error("unexpected dataset header: " + header);
    }
  }

  LabeledTable table;
  std::size_t line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != labeler::kFeatureCount + 4) {
      throw std::runtime_error("dataset line " + std::to_string(line_number) +
                               ": expected " + std::to_string(labeler::kFeatureCount + 4) +
                               " fields, got " + std::to_string(fields.size()));
    }
    std::array<double, labeler::kFeatureCount> f{};
    for (std::size_t k = 0; k < labeler::kFeatureCount; ++k) {
      f[k] = parse_field(fields[k], line_number);
    }
    table.features.push_back(f);
    table.merge.push_back(static_cast<int>(parse_field(fields[labeler::kFeatureCount], line_number)));
    table.accel.push_back(parse_field(fields[labeler::kFeatureCount + 1], line_number));
    table.heading.push_back(parse_field(fields[labeler::kFeatureCount + 2], line_number));
    table.flagged.push_back(static_cast<int>(parse_field(fields[labeler::kFeatureCount + 3], line_number)));
  }
  return table;
}

LabeledTable load_dataset_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  return load_dataset_csv(in);
}

DatasetSplit split_dataset(const Dataset& d, const SplitRatios& ratios, Task task,
                           std::uint64_t seed) {
  DatasetSplit split;
  if (d.size() == 0) return split;
  std::mt19937_64 rng(seed);

  if (task == Task::classification) {
    std::map<double, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < d.size(); ++i) by_class[d.y[i]].push_back(i);

    for (auto& [label, rows] : by_class) {
      shuffle_in_place(rows, rng);
      const auto counts = allocate_counts(rows.size(), ratios);
      const double r[3] = {ratios.train, ratios.validation, ratios.test};
      for (int k = 0; k < 3; ++k) {
        if (r[k] > 0.0 && counts[k] == 0) {
          std::ostringstream msg;
          msg << "class " << label << " has too few rows to appear in every split";
          throw std::runtime_error(msg.str());
        }
      }
      std::size_t cursor = 0;
      for (std::size_t k = 0; k < counts[0]; ++k) append_row(split.train, d, rows[cursor++]);
      for (std::size_t k = 0; k < counts[1]; ++k) append_row(split.validation, d, rows[cursor++]);
      for (std::size_t k = 0; k < counts[2]; ++k) append_row(split.test, d, rows[cursor++]);
    }
  } else {
    auto rows = shuffled_indices(d.size(), rng);
    const auto counts = allocate_counts(rows.size(), ratios);
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < counts[0]; ++k) append_row(split.train, d, rows[cursor++]);
    for (std::size_t k = 0; k < counts[1]; ++k) append_row(split.validation, d, rows[cursor++]);
    for (std::size_t k = 0; k < counts[2]; ++k) append_row(split.test, d, rows[cursor++]);
  }
  return split;
}

Standardizer Standardizer::fit(const Dataset& d) {
  Standardizer s;
  const std::size_t cols = d.feature_count();
  s.mean.assign(cols, 0.0);
  s.stddev.assign(cols, 1.0);
  if (d.size() == 0) return s;

  for (const auto& row : d.x) {
    for (std::size_t k = 0; k < cols; ++k) s.mean[k] += row[k];
  }
  for (std::size_t k = 0; k < cols; ++k) s.mean[k] /= static_cast<double>(d.size());

  std::vector<double> var(cols, 0.0);
  for (const auto& row : d.x) {
    for (std::size_t k = 0; k < cols; ++k) {
      const double delta = row[k] - s.mean[k];
      var[k] += delta * delta;
    }
  }
  for (std::size_t k = 0; k < cols; ++k) {
    const double sd = std::sqrt(var[k] / static_cast<double>(d.size()));
    s.stddev[k] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::transform(const std::vector<double>& row) const {
  std::vector<double> out(row.size());
  for (std::size_t k = 0; k < row.size(); ++k) out[k] = (row[k] - mean[k]) / stddev[k];
  return out;
}

Dataset Standardizer::transform(const Dataset& d) const {
  Dataset out;
  out.x.reserve(d.size());
  out.y = d.y;
  for (const auto& row : d.x) out.x.push_back(transform(row));
  return out;
}

}  // namespace lanemerge::ml
