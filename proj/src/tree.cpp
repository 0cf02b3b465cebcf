#include "lanemerge/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "lanemerge/rng.hpp"

namespace lanemerge::ml {

namespace {

constexpr double kMinGain = 1e-12;

int depth_below(const std::vector<TreeNode>& nodes, int idx) {
  const TreeNode& n = nodes[static_cast<std::size_t>(idx)];
  if (n.is_leaf()) return 0;
  return 1 + std::max(depth_below(nodes, n.left), depth_below(nodes, n.right));
}

double gini(const std::vector<std::size_t>& counts, std::size_t total) {
  double sum = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    sum += p * p;
  }
  return 1.0 - sum;
}

}  // namespace

struct DecisionTree::FitContext {
  const Dataset* d = nullptr;
  std::vector<int> slot;         // classification: class slot per dataset row
  std::vector<double> labels;    // slot -> label value, ascending
  std::size_t mtry = 0;
  std::mt19937_64* rng = nullptr;
};

void DecisionTree::fit(const Dataset& d) {
  std::vector<std::size_t> rows(d.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  fit(d, rows, 0, nullptr);
}

void DecisionTree::fit(const Dataset& d, const std::vector<std::size_t>& rows, std::size_t mtry,
                       std::mt19937_64* rng) {
  if (rows.empty()) throw std::invalid_argument("empty training set");
  nodes_.clear();

  FitContext ctx;
  ctx.d = &d;
  ctx.mtry = mtry >= d.feature_count() ? 0 : mtry;
  ctx.rng = ctx.mtry > 0 ? rng : nullptr;
  if (ctx.mtry > 0 && !ctx.rng) throw std::invalid_argument("feature subsampling needs a generator");

  if (options_.task == Task::classification) {
    std::map<double, int> slot_of;
    for (std::size_t r : rows) slot_of.emplace(d.y[r], 0);
    int next = 0;
    for (auto& [label, slot] : slot_of) {
      slot = next++;
      ctx.labels.push_back(label);
    }
    ctx.slot.resize(d.size(), -1);
    for (std::size_t r : rows) ctx.slot[r] = slot_of[d.y[r]];
  }

  std::vector<std::size_t> work(rows);
  build(ctx, work, 0);
}

int DecisionTree::build(FitContext& ctx, std::vector<std::size_t>& rows, int depth) {
  const Dataset& d = *ctx.d;
  const std::size_t n = rows.size();
  const std::size_t n_features = d.feature_count();
  const bool classify = options_.task == Task::classification;

  const int idx = static_cast<int>(nodes_.size());
  nodes_.emplace_back();

  // Node statistics and prediction.
  std::vector<std::size_t> counts;
  double sum = 0.0, sum_sq = 0.0;
  double value;
  double parent_score;
  if (classify) {
    counts.assign(ctx.labels.size(), 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(ctx.slot[r])];
    std::size_t best_count = 0;
    std::size_t best_slot = 0;
    for (std::size_t s = 0; s < counts.size(); ++s) {
      if (counts[s] > best_count) {  // ties keep the smaller label
        best_count = counts[s];
        best_slot = s;
      }
    }
    value = ctx.labels[best_slot];
    parent_score = gini(counts, n);
  } else {
    for (std::size_t r : rows) {
      sum += d.y[r];
      sum_sq += d.y[r] * d.y[r];
    }
    value = sum / static_cast<double>(n);
    parent_score = std::max(0.0, sum_sq - sum * sum / static_cast<double>(n));
  }

  auto make_leaf = [&]() {
    nodes_[static_cast<std::size_t>(idx)].value = value;
    return idx;
  };

  if (depth >= options_.max_depth || n < options_.min_samples_split || parent_score <= kMinGain) {
    return make_leaf();
  }

  // Candidate features, always scanned in ascending order.
  std::vector<std::size_t> candidates;
  if (ctx.mtry == 0) {
    candidates.resize(n_features);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
  } else {
    candidates.resize(n_features);
    std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    for (std::size_t i = 0; i < ctx.mtry; ++i) {
      const std::size_t j = i + draw_index(*ctx.rng, n_features - i);
      std::swap(candidates[i], candidates[j]);
    }
    candidates.resize(ctx.mtry);
    std::sort(candidates.begin(), candidates.end());
  }

  double best_score = parent_score - kMinGain;
  int best_feature = -1;
  double best_threshold = 0.0;

  std::vector<std::size_t> order(rows);
  std::vector<std::size_t> left_counts;
  for (std::size_t f : candidates) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return d.x[a][f] < d.x[b][f];
    });

    if (classify) {
      left_counts.assign(counts.size(), 0);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        ++left_counts[static_cast<std::size_t>(ctx.slot[order[i]])];
        const double v = d.x[order[i]][f];
        const double next = d.x[order[i + 1]][f];
        if (next <= v) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        double left_sum = 0.0, right_sum = 0.0;
        for (std::size_t s = 0; s < counts.size(); ++s) {
          const double pl = static_cast<double>(left_counts[s]) / static_cast<double>(n_left);
          const double pr = static_cast<double>(counts[s] - left_counts[s]) /
                            static_cast<double>(n_right);
          left_sum += pl * pl;
          right_sum += pr * pr;
        }
        const double score = (static_cast<double>(n_left) * (1.0 - left_sum) +
                              static_cast<double>(n_right) * (1.0 - right_sum)) /
                             static_cast<double>(n);
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = (v + next) / 2.0;
        }
      }
    } else {
      double left_sum = 0.0, left_sq = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double yv = d.y[order[i]];
        left_sum += yv;
        left_sq += yv * yv;
        const double v = d.x[order[i]][f];
        const double next = d.x[order[i + 1]][f];
        if (next <= v) continue;
        const std::size_t n_left = i + 1;
        const std::size_t n_right = n - n_left;
        const double right_sum = sum - left_sum;
        const double right_sq = sum_sq - left_sq;
        const double sse_left =
            std::max(0.0, left_sq - left_sum * left_sum / static_cast<double>(n_left));
        const double sse_right =
            std::max(0.0, right_sq - right_sum * right_sum / static_cast<double>(n_right));
        const double score = sse_left + sse_right;
        if (score < best_score) {
          best_score = score;
          best_feature = static_cast<int>(f);
          best_threshold = (v + next) / 2.0;
        }
      }
    }
  }

  if (best_feature < 0) return make_leaf();

  auto mid = std::stable_partition(rows.begin(), rows.end(), [&](std::size_t r) {
    return d.x[r][static_cast<std::size_t>(best_feature)] <= best_threshold;
  });
  std::vector<std::size_t> left_rows(rows.begin(), mid);
  std::vector<std::size_t> right_rows(mid, rows.end());

  const int left = build(ctx, left_rows, depth + 1);
  const int right = build(ctx, right_rows, depth + 1);

  TreeNode& node = nodes_[static_cast<std::size_t>(idx)];
  node.feature = best_feature;
  node.threshold = best_threshold;
  node.value = value;
  node.left = left;
  node.right = right;
  return idx;
}

double DecisionTree::predict(const std::vector<double>& x) const {
  return nodes_[static_cast<std::size_t>(leaf_of(x))].value;
}

int DecisionTree::leaf_of(const std::vector<double>& x) const {
  if (nodes_.empty()) throw std::logic_error("predict before fit");
  int idx = 0;
  while (!nodes_[static_cast<std::size_t>(idx)].is_leaf()) {
    const TreeNode& n = nodes_[static_cast<std::size_t>(idx)];
    idx = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return idx;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  return depth_below(nodes_, 0);
}

}  // namespace lanemerge::ml
