#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>
#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "keygraph/keygraph.hpp"

namespace oracle {

using keygraph::WeightedGraph;

struct EdgeSpec {
  std::size_t a, b;
  double w = 1.0;
};

inline WeightedGraph make_graph(std::size_t n, const std::vector<EdgeSpec>& edges) {
  WeightedGraph g(n);
  for (const auto& e : edges) g.add_edge(e.a, e.b, e.w);
  return g;
}

inline Eigen::MatrixXd dense(const WeightedGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (const auto& e : g.neighbors(i)) w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(e.to)) = e.weight;
  }
  return w;
}

// Connected random graph: a random spanning tree plus extra edges, integer weights.
inline WeightedGraph random_connected_graph(keygraph::Rng& rng, std::size_t n, double extra_density,
                                            int max_weight = 4) {
  WeightedGraph g(n);
  for (std::size_t v = 1; v < n; ++v) {
    g.add_edge(v, rng.index(v), 1.0 + static_cast<double>(rng.index(static_cast<std::size_t>(max_weight))));
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!g.has_edge(a, b) && rng.uniform() < extra_density) {
        g.add_edge(a, b, 1.0 + static_cast<double>(rng.index(static_cast<std::size_t>(max_weight))));
      }
    }
  }
  return g;
}

// Arbitrary random graph; may be disconnected and contain isolated nodes.
inline WeightedGraph random_graph(keygraph::Rng& rng, std::size_t n, double density) {
  WeightedGraph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (rng.uniform() < density) g.add_edge(a, b, 1.0 + static_cast<double>(rng.index(3)));
    }
  }
  return g;
}

// sigma = s / mu over the n+1 gaps between 0, p_1..p_n, N+1.
inline double sigma(const std::vector<std::size_t>& positions, std::size_t N) {
  std::vector<double> p{0.0};
  for (auto x : positions) p.push_back(static_cast<double>(x));
  p.push_back(static_cast<double>(N + 1));
  const double n = static_cast<double>(positions.size());
  const double mu = (static_cast<double>(N) + 1.0) / (n + 1.0);
  double ss = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) ss += std::pow((p[i + 1] - p[i]) - mu, 2);
  return std::sqrt(ss / (n - 1.0)) / mu;
}

// Core number by definition: the largest k for which the node survives in the
// maximal subgraph of minimum degree >= k, found by repeated deletion per k.
inline std::vector<int> coreness(const WeightedGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<int> core(n, 0);
  for (int k = 1; k <= static_cast<int>(n); ++k) {
    std::vector<bool> alive(n, true);
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        int d = 0;
        for (const auto& e : g.neighbors(v)) d += alive[e.to] ? 1 : 0;
        if (d < k) {
          alive[v] = false;
          changed = true;
        }
      }
    }
    bool any = false;
    for (std::size_t v = 0; v < n; ++v) {
      if (alive[v]) {
        core[v] = k;
        any = true;
      }
    }
    if (!any) break;
  }
  return core;
}

// CC by enumerating neighbor pairs on the adjacency matrix.
inline std::vector<double> clustering(const WeightedGraph& g) {
  const auto w = dense(g);
  const auto n = w.rows();
  std::vector<double> out(static_cast<std::size_t>(n), 0.0);
  for (Eigen::Index v = 0; v < n; ++v) {
    std::vector<Eigen::Index> nb;
    for (Eigen::Index u = 0; u < n; ++u) {
      if (w(v, u) > 0) nb.push_back(u);
    }
    const double k = static_cast<double>(nb.size());
    if (nb.size() < 2) continue;
    double links = 0;
    for (std::size_t i = 0; i < nb.size(); ++i) {
      for (std::size_t j = i + 1; j < nb.size(); ++j) links += w(nb[i], nb[j]) > 0 ? 1 : 0;
    }
    out[static_cast<std::size_t>(v)] = links / (k * (k - 1) / 2);
  }
  return out;
}

// Column-normalized transition M[i][j] = w_ij / s_j.
inline Eigen::MatrixXd transition(const WeightedGraph& g) {
  Eigen::MatrixXd w = dense(g);
  const Eigen::VectorXd s = w.colwise().sum().transpose();
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    if (s(j) > 0) w.col(j) /= s(j);
  }
  return w;
}

// Fixed point of x = (1-d) + d M x, solved directly.
inline std::vector<double> pagerank(const WeightedGraph& g, double d) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - d * transition(g);
  const Eigen::VectorXd x = a.partialPivLu().solve(Eigen::VectorXd::Constant(n, 1.0 - d));
  return {x.data(), x.data() + n};
}

// Fixed point of x = (1-a) p + a M x with p the normalized inverse-position weights.
inline std::vector<double> position_rank(const WeightedGraph& g, const std::vector<std::vector<std::size_t>>& pos,
                                         double alpha) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double w = 0;
    for (auto x : pos[static_cast<std::size_t>(i)]) w += 1.0 / static_cast<double>(x);
    p(i) = w;
  }
  p /= p.sum();
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - alpha * transition(g);
  const Eigen::VectorXd x = a.partialPivLu().solve((1.0 - alpha) * p);
  return {x.data(), x.data() + n};
}

// Unit-norm nonnegative eigenvector of the largest eigenvalue of W.
inline std::vector<double> eigenvector(const WeightedGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense(g));
  Eigen::VectorXd v = es.eigenvectors().col(es.eigenvalues().size() - 1);
  if (v.sum() < 0) v = -v;
  v /= v.norm();
  return {v.data(), v.data() + v.size()};
}

inline keygraph::Document sentences(const std::vector<std::vector<std::string>>& sents) {
  std::string text;
  for (const auto& s : sents) {
    for (const auto& w : s) text += w + ' ';
    text += ". ";
  }
  return keygraph::preprocess(text, {});
}

// Direct Bayes rule with per-class sample moments.
inline double naive_bayes(const keygraph::TrainingSet& ts, const keygraph::FeatureVector& x) {
  double joint[2];
  for (int c = 0; c < 2; ++c) {
    std::vector<const keygraph::FeatureVector*> rows;
    for (const auto& r : ts.records) {
      if ((r.label == keygraph::Label::positive) == (c == 1)) rows.push_back(&r.features);
    }
    double density = static_cast<double>(rows.size()) / static_cast<double>(ts.size());
    for (std::size_t f = 0; f < keygraph::kFeatureCount; ++f) {
      double m = 0, v = 0;
      for (const auto* r : rows) m += (*r)[f];
      m /= static_cast<double>(rows.size());
      for (const auto* r : rows) v += ((*r)[f] - m) * ((*r)[f] - m);
      v = std::max(v / static_cast<double>(rows.size()), 1e-9);
      density *= std::exp(-(x[f] - m) * (x[f] - m) / (2 * v)) / std::sqrt(2 * std::numbers::pi * v);
    }
    joint[c] = density;
  }
  return joint[1] / (joint[0] + joint[1]);
}

}  // namespace oracle

namespace testutil {

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("keygraph-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

// Training set with two Gaussian-ish clusters; positives centred at `pos`, negatives at `neg`.
inline keygraph::TrainingSet clustered_set(std::uint64_t seed, std::size_t positives, std::size_t negatives,
                                           double pos = 0.7, double neg = 0.3, double spread = 0.15) {
  keygraph::Rng rng(seed);
  keygraph::TrainingSet ts;
  auto draw = [&](double centre) {
    keygraph::FeatureVector fv;
    for (auto& v : fv.values) v = std::clamp(centre + spread * (2 * rng.uniform() - 1), 0.0, 1.0);
    return fv;
  };
  for (std::size_t i = 0; i < positives; ++i) {
    ts.records.push_back({"d", "p" + std::to_string(i), draw(pos), keygraph::Label::positive, false});
  }
  for (std::size_t i = 0; i < negatives; ++i) {
    ts.records.push_back({"d", "n" + std::to_string(i), draw(neg), keygraph::Label::negative, false});
  }
  return ts;
}

}  // namespace testutil
