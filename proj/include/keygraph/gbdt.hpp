#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "keygraph/error.hpp"
#include "keygraph/features.hpp"
#include "keygraph/training.hpp"

namespace keygraph {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output, before the learning rate

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// Binary regression tree; x[feature] <= threshold goes left. Node 0 is the root.
struct RegressionTree {
  std::vector<TreeNode> nodes;

  double evaluate(const FeatureVector& x) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
      i = static_cast<std::size_t>(x[static_cast<std::size_t>(nodes[i].feature)] <= nodes[i].threshold
                                       ? nodes[i].left
                                       : nodes[i].right);
    }
    return nodes[i].value;
  }

  int depth() const { return depth_from(0); }

  friend bool operator==(const RegressionTree&, const RegressionTree&) = default;

 private:
  int depth_from(std::size_t i) const {
    if (nodes[i].feature < 0) return 0;
    return 1 + std::max(depth_from(static_cast<std::size_t>(nodes[i].left)),
                        depth_from(static_cast<std::size_t>(nodes[i].right)));
  }
};

struct GbdtParams {
  int trees = 100;
  int max_depth = 3;
  double learning_rate = 0.1;
  double lambda = 1.0;
  std::size_t min_samples_leaf = 1;

  void validate() const {
    if (trees < 1) throw ConfigError("gbdt needs at least one tree");
    if (max_depth < 1) throw ConfigError("gbdt max_depth must be at least 1");
    if (!(learning_rate > 0.0)) throw ConfigError("gbdt learning rate must be positive");
    if (lambda < 0.0) throw ConfigError("gbdt lambda must be non-negative");
    if (min_samples_leaf < 1) throw ConfigError("gbdt min_samples_leaf must be at least 1");
  }
};

// Logistic-loss boosting: score = logistic(initial + rate * sum_t tree_t(x)).
struct GradientBoostedTrees {
  double initial_score = 0.0;
  double learning_rate = 0.1;
  double lambda = 1.0;
  int max_depth = 3;
  std::vector<RegressionTree> trees;

  double raw_score(const FeatureVector& x) const {
    double f = initial_score;
    for (const auto& t : trees) f += learning_rate * t.evaluate(x);
    return f;
  }
  double positive_probability(const FeatureVector& x) const { return 1.0 / (1.0 + std::exp(-raw_score(x))); }

  friend bool operator==(const GradientBoostedTrees&, const GradientBoostedTrees&) = default;
};

struct GbdtTrace {
  std::vector<double> loss;  // mean training log-loss; entry 0 is the initial model
};

namespace detail {

inline double log_loss(double raw, double y) {
  // log(1 + e^raw) - y * raw, evaluated without overflow
  const double softplus = raw > 0 ? raw + std::log1p(std::exp(-raw)) : std::log1p(std::exp(raw));
  return softplus - y * raw;
}

inline double split_midpoint(double lo, double hi) {
  const double t = lo + (hi - lo) / 2.0;
  return (t >= lo && t < hi) ? t : lo;
}

}  // namespace detail

/// Gradient boosting with logistic loss.
///
/// Starts from the log-odds of the positive rate. Every round fits a
/// depth-limited regression tree to the residuals y - p, choosing splits by
/// squared-error reduction at midpoints between distinct feature values, and
/// sets each leaf to sum(residual) / (sum(p (1 - p)) + lambda).
inline GradientBoostedTrees train_gbdt(const TrainingSet& ts, const GbdtParams& params = {},
                                       GbdtTrace* trace = nullptr) {
  params.validate();
  const auto& recs = ts.records;
  const std::size_t n = recs.size();
  const std::size_t pos = ts.positives();
  if (pos == 0 || pos == n) throw DegenerateTrainingSet("gbdt needs both classes in the training data");

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = recs[i].label == Label::positive ? 1.0 : 0.0;

  // Row order per feature, computed once.
  std::vector<std::vector<std::uint32_t>> sorted(kFeatureCount, std::vector<std::uint32_t>(n));
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    std::iota(sorted[f].begin(), sorted[f].end(), 0u);
    std::stable_sort(sorted[f].begin(), sorted[f].end(), [&](std::uint32_t a, std::uint32_t b) {
      return recs[a].features[f] < recs[b].features[f];
    });
  }

  GradientBoostedTrees model;
  model.learning_rate = params.learning_rate;
  model.lambda = params.lambda;
  model.max_depth = params.max_depth;
  model.initial_score = std::log(static_cast<double>(pos) / static_cast<double>(n - pos));

  std::vector<double> raw(n, model.initial_score), residual(n), hessian(n);
  std::vector<int> node_of(n);

  auto mean_loss = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += detail::log_loss(raw[i], y[i]);
    return s / static_cast<double>(n);
  };
  if (trace) trace->loss.push_back(mean_loss());

  struct Stats {
    double sum = 0.0;
    double count = 0.0;
  };
  struct Best {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
  };
  struct Scan {
    Stats left;
    double last = 0.0;
    bool started = false;
  };

  for (int t = 0; t < params.trees; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double p = 1.0 / (1.0 + std::exp(-raw[i]));
      residual[i] = y[i] - p;
      hessian[i] = p * (1.0 - p);
    }
    RegressionTree tree;
    tree.nodes.emplace_back();
    std::fill(node_of.begin(), node_of.end(), 0);
    std::vector<int> frontier = {0};

    for (int depth = 0; depth < params.max_depth && !frontier.empty(); ++depth) {
      const std::size_t nodes = tree.nodes.size();
      std::vector<char> open(nodes, 0);
      for (int v : frontier) open[static_cast<std::size_t>(v)] = 1;
      std::vector<Stats> total(nodes);
      for (std::size_t i = 0; i < n; ++i) {
        auto& s = total[static_cast<std::size_t>(node_of[i])];
        s.sum += residual[i];
        s.count += 1.0;
      }
      std::vector<Best> best(nodes);
      const auto min_leaf = static_cast<double>(params.min_samples_leaf);
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        std::vector<Scan> scan(nodes);
        for (std::uint32_t i : sorted[f]) {
          const auto v = static_cast<std::size_t>(node_of[i]);
          if (!open[v]) continue;
          auto& sc = scan[v];
          const double x = recs[i].features[f];
          if (sc.started && x != sc.last && sc.left.count >= min_leaf &&
              total[v].count - sc.left.count >= min_leaf) {
            const double rs = total[v].sum - sc.left.sum;
            const double rc = total[v].count - sc.left.count;
            const double gain = sc.left.sum * sc.left.sum / sc.left.count + rs * rs / rc -
                                total[v].sum * total[v].sum / total[v].count;
            if (gain > best[v].gain + 1e-12) {
              best[v] = {gain, static_cast<int>(f), detail::split_midpoint(sc.last, x)};
            }
          }
          sc.left.sum += residual[i];
          sc.left.count += 1.0;
          sc.last = x;
          sc.started = true;
        }
      }
      std::vector<int> next;
      for (int v : frontier) {
        const auto& b = best[static_cast<std::size_t>(v)];
        if (b.feature < 0) continue;
        const int l = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(v)];
        node.feature = b.feature;
        node.threshold = b.threshold;
        node.left = l;
        node.right = l + 1;
        next.push_back(l);
        next.push_back(l + 1);
      }
      for (std::size_t i = 0; i < n; ++i) {
        const auto& node = tree.nodes[static_cast<std::size_t>(node_of[i])];
        if (node.feature >= 0) {
          node_of[i] = recs[i].features[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                  : node.right;
        }
      }
      frontier = std::move(next);
    }

    std::vector<double> g_sum(tree.nodes.size(), 0.0), h_sum(tree.nodes.size(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      g_sum[static_cast<std::size_t>(node_of[i])] += residual[i];
      h_sum[static_cast<std::size_t>(node_of[i])] += hessian[i];
    }
    for (std::size_t v = 0; v < tree.nodes.size(); ++v) {
      if (tree.nodes[v].feature < 0) {
        const double denom = h_sum[v] + params.lambda;
        tree.nodes[v].value = denom > 0.0 ? g_sum[v] / denom : 0.0;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] += params.learning_rate * tree.nodes[static_cast<std::size_t>(node_of[i])].value;
    }
    model.trees.push_back(std::move(tree));
    if (trace) trace->loss.push_back(mean_loss());
  }
  return model;
}

}  // namespace keygraph
