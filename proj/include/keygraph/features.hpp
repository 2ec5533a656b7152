#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <ranges>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "keygraph/error.hpp"
#include "keygraph/graph.hpp"
#include "keygraph/log.hpp"

namespace keygraph {

enum class Feature : std::size_t {
  strength,
  eigenvector,
  pagerank,
  positionrank,
  coreness,
  clustering,
};

inline constexpr std::size_t kFeatureCount = 6;

// Column names used by every tabular export.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "strength", "eigen", "pr", "posr", "core", "cc"};

struct FeatureVector {
  std::array<double, kFeatureCount> values{};

  double& operator[](Feature f) { return values[static_cast<std::size_t>(f)]; }
  double operator[](Feature f) const { return values[static_cast<std::size_t>(f)]; }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct RankConfig {
  double damping = 0.85;  // PageRank
  double alpha = 0.85;    // PositionRank
  double tolerance = 1e-6;
  int max_iterations = 200;

  void validate() const {
    if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("damping must lie in (0, 1)");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");
    if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  }
};

struct RankResult {
  std::vector<double> scores;
  bool converged = false;
  int iterations = 0;
};

/// Weighted degree of every node.
inline std::vector<double> strength(const WeightedGraph& g) {
  std::vector<double> out(g.node_count(), 0.0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (const auto& e : g.neighbors(i)) out[i] += e.weight;
  }
  return out;
}

namespace detail {

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// y = M x where M[i][j] = w_ji / strength(j): the weight-normalized transition
// used by both PageRank variants.
inline void normalized_spread(const WeightedGraph& g, std::span<const double> strengths,
                              std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    double sum = 0.0;
    for (const auto& e : g.neighbors(i)) {
      if (strengths[e.to] > 0.0) sum += e.weight / strengths[e.to] * x[e.to];
    }
    y[i] = sum;
  }
}

}  // namespace detail

/// Eigenvector centrality by power iteration from the uniform vector,
/// renormalized to unit Euclidean length each step.
///
/// Iterates with W + I rather than W. Both share the dominant eigenvector,
/// but the shift keeps bipartite graphs (stars, paths, trees) from
/// oscillating between two vectors forever.
inline RankResult eigenvector_centrality(const WeightedGraph& g, const RankConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = g.node_count();
  RankResult r;
  if (n == 0) {
    r.converged = true;
    return r;
  }
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  for (r.iterations = 1; r.iterations <= cfg.max_iterations; ++r.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      double sum = x[i];
      for (const auto& e : g.neighbors(i)) sum += e.weight * x[e.to];
      y[i] = sum;
    }
    double norm = 0.0;
    for (double v : y) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : y) v /= norm;
    const double diff = detail::max_abs_diff(x, y);
    x.swap(y);
    if (diff < cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, cfg.max_iterations);
  r.scores = std::move(x);
  return r;
}

/// TextRank word score: WS(i) = (1 - d) + d * sum_j w_ji / strength(j) * WS(j),
/// iterated from all ones. Scores are not normalized to sum to one.
inline RankResult pagerank(const WeightedGraph& g, const RankConfig& cfg = {}) {
  cfg.validate();
  const std::size_t n = g.node_count();
  const auto s = strength(g);
  RankResult r;
  std::vector<double> x(n, 1.0), y(n);
  for (r.iterations = 1; r.iterations <= cfg.max_iterations; ++r.iterations) {
    detail::normalized_spread(g, s, x, y);
    for (double& v : y) v = (1.0 - cfg.damping) + cfg.damping * v;
    const double diff = detail::max_abs_diff(x, y);
    x.swap(y);
    if (diff < cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, cfg.max_iterations);
  r.scores = std::move(x);
  return r;
}

/// Position bias: each node weighs the sum of inverse occurrence positions,
/// normalized to sum to one.
inline std::vector<double> position_bias(std::span<const std::vector<std::size_t>> positions) {
  std::vector<double> w(positions.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    for (std::size_t p : positions[i]) w[i] += 1.0 / static_cast<double>(p);
    total += w[i];
  }
  if (total > 0.0) {
    for (double& v : w) v /= total;
  } else if (!w.empty()) {
    std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(w.size()));
  }
  return w;
}

/// PositionRank: S = (1 - alpha) * bias + alpha * M S, iterated from the bias.
inline RankResult position_rank(const WeightedGraph& g, std::span<const std::vector<std::size_t>> positions,
                                const RankConfig& cfg = {}) {
  cfg.validate();
  if (positions.size() != g.node_count()) throw ConfigError("position lists do not match graph size");
  const auto s = strength(g);
  const auto bias = position_bias(positions);
  RankResult r;
  std::vector<double> x = bias, y(bias.size());
  for (r.iterations = 1; r.iterations <= cfg.max_iterations; ++r.iterations) {
    detail::normalized_spread(g, s, x, y);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1.0 - cfg.alpha) * bias[i] + cfg.alpha * y[i];
    const double diff = detail::max_abs_diff(x, y);
    x.swap(y);
    if (diff < cfg.tolerance) {
      r.converged = true;
      break;
    }
  }
  r.iterations = std::min(r.iterations, cfg.max_iterations);
  r.scores = std::move(x);
  return r;
}

/// k-core number of each node on the unweighted degree structure
/// (bucket-based peeling, linear in the edge count).
inline std::vector<int> coreness(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<std::size_t> deg(n), pos(n), order(n);
  std::size_t max_deg = 0;
  for (std::size_t v = 0; v < n; ++v) {
    deg[v] = g.degree(v);
    max_deg = std::max(max_deg, deg[v]);
  }
  std::vector<std::size_t> bin(max_deg + 1, 0);
  for (std::size_t v = 0; v < n; ++v) ++bin[deg[v]];
  std::size_t start = 0;
  for (auto& b : bin) {
    const std::size_t count = b;
    b = start;
    start += count;
  }
  for (std::size_t v = 0; v < n; ++v) {
    pos[v] = bin[deg[v]]++;
    order[pos[v]] = v;
  }
  for (std::size_t d = max_deg; d > 0; --d) bin[d] = bin[d - 1];
  if (!bin.empty()) bin[0] = 0;

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t v = order[i];
    for (const auto& e : g.neighbors(v)) {
      const std::size_t u = e.to;
      if (deg[u] > deg[v]) {
        // Move u to the front of its bin, then shrink its degree.
        const std::size_t du = deg[u];
        const std::size_t pu = pos[u];
        const std::size_t pw = bin[du];
        const std::size_t w = order[pw];
        if (u != w) {
          order[pu] = w;
          pos[w] = pu;
          order[pw] = u;
          pos[u] = pw;
        }
        ++bin[du];
        --deg[u];
      }
    }
  }
  return std::vector<int>(deg.begin(), deg.end());
}

/// Topological (unweighted) local clustering coefficient; 0 for degree <= 1.
inline std::vector<double> clustering_coefficient(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<double> out(n, 0.0);
  std::vector<char> mark(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    const std::size_t k = nb.size();
    if (k < 2) continue;
    for (const auto& e : nb) mark[e.to] = 1;
    std::size_t links = 0;
    for (const auto& e : nb) {
      for (const auto& f : g.neighbors(e.to)) links += mark[f.to];
    }
    for (const auto& e : nb) mark[e.to] = 0;
    // each neighbor edge was seen from both ends
    out[v] = static_cast<double>(links) / static_cast<double>(k * (k - 1));
  }
  return out;
}

inline constexpr double kConstantRangeTolerance = 1e-12;

// Rescales to [0, 1]. A constant range maps everything to 0; ranges within
// round-off of constant (e.g. PageRank on a regular graph) count as constant.
template <std::ranges::random_access_range R>
void min_max_normalize(R&& values) {
  if (std::ranges::empty(values)) return;
  const auto [lo, hi] = std::ranges::minmax(values);
  const double low = lo, span = hi - lo;
  const bool constant = span <= kConstantRangeTolerance * std::max({1.0, std::abs(lo), std::abs(hi)});
  for (auto& v : values) v = constant ? 0.0 : (v - low) / span;
}

struct FeatureRecord {
  std::string word;
  FeatureVector raw;
  FeatureVector normalized;
};

/// All six properties per node, plus their per-document min-max scaled values.
/// Records follow graph node order.
inline std::vector<FeatureRecord> build_feature_records(const TextGraph& tg, const RankConfig& cfg = {}) {
  const std::size_t n = tg.size();
  std::vector<FeatureRecord> out(n);
  if (n == 0) return out;

  const auto& g = tg.graph;
  std::array<std::vector<double>, kFeatureCount> columns;
  columns[0] = strength(g);
  auto ev = eigenvector_centrality(g, cfg);
  auto pr = pagerank(g, cfg);
  auto posr = position_rank(g, tg.positions, cfg);
  if (!ev.converged) log::warn("eigenvector centrality did not converge");
  if (!pr.converged) log::warn("pagerank did not converge");
  if (!posr.converged) log::warn("positionrank did not converge");
  columns[1] = std::move(ev.scores);
  columns[2] = std::move(pr.scores);
  columns[3] = std::move(posr.scores);
  const auto core = coreness(g);
  columns[4].assign(core.begin(), core.end());
  columns[5] = clustering_coefficient(g);

  for (std::size_t i = 0; i < n; ++i) {
    out[i].word = tg.words[i];
    for (std::size_t f = 0; f < kFeatureCount; ++f) out[i].raw[f] = columns[f][i];
  }
  if (n == 1) log::warn("single-node graph: all normalized features set to 0");
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    min_max_normalize(columns[f]);
    for (std::size_t i = 0; i < n; ++i) out[i].normalized[f] = columns[f][i];
  }
  return out;
}

}  // namespace keygraph
