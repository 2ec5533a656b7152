#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "keygraph/error.hpp"
#include "keygraph/features.hpp"
#include "keygraph/log.hpp"
#include "keygraph/random.hpp"
#include "keygraph/training.hpp"

namespace keygraph {

inline constexpr double kVarianceFloor = 1e-9;

// Gaussian naive Bayes over the six features. Index 0 is the negative class.
struct GaussianNaiveBayes {
  std::array<double, 2> prior{};
  std::array<FeatureVector, 2> mean{};
  std::array<FeatureVector, 2> variance{};

  // Joint log density log p(c) + sum_f log N(x_f; mean, variance).
  double log_joint(std::size_t c, const FeatureVector& x) const {
    double l = std::log(prior[c]);
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const double v = variance[c][f];
      const double d = x[f] - mean[c][f];
      l += -0.5 * std::log(2.0 * std::numbers::pi * v) - d * d / (2.0 * v);
    }
    return l;
  }

  // Posterior of both classes; sums to one.
  std::array<double, 2> posterior(const FeatureVector& x) const {
    const double ln = log_joint(0, x), lp = log_joint(1, x);
    const double m = std::max(ln, lp);
    const double en = std::exp(ln - m), ep = std::exp(lp - m);
    return {en / (en + ep), ep / (en + ep)};
  }

  double positive_probability(const FeatureVector& x) const { return posterior(x)[1]; }

  friend bool operator==(const GaussianNaiveBayes&, const GaussianNaiveBayes&) = default;
};

// Fits class priors and per-class mean / variance (maximum likelihood,
// floored at 1e-9) on the selected rows.
inline GaussianNaiveBayes train_nb(std::span<const CandidateRecord> records, std::span<const std::size_t> rows) {
  std::array<double, 2> count{};
  std::array<FeatureVector, 2> sum{}, sum_sq{};
  for (std::size_t r : rows) {
    const auto& rec = records[r];
    const std::size_t c = rec.label == Label::positive ? 1 : 0;
    count[c] += 1.0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) sum[c][f] += rec.features[f];
  }
  if (count[0] == 0.0 || count[1] == 0.0) {
    throw DegenerateTrainingSet("naive Bayes needs both classes in the training data");
  }
  GaussianNaiveBayes nb;
  const double total = count[0] + count[1];
  for (std::size_t c = 0; c < 2; ++c) {
    nb.prior[c] = count[c] / total;
    for (std::size_t f = 0; f < kFeatureCount; ++f) nb.mean[c][f] = sum[c][f] / count[c];
  }
  // second pass for numerically stable variances
  for (std::size_t r : rows) {
    const auto& rec = records[r];
    const std::size_t c = rec.label == Label::positive ? 1 : 0;
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      const double d = rec.features[f] - nb.mean[c][f];
      sum_sq[c][f] += d * d;
    }
  }
  for (std::size_t c = 0; c < 2; ++c) {
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      nb.variance[c][f] = std::max(sum_sq[c][f] / count[c], kVarianceFloor);
    }
  }
  return nb;
}

inline GaussianNaiveBayes train_nb(std::span<const CandidateRecord> records) {
  std::vector<std::size_t> rows(records.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return train_nb(records, rows);
}

inline GaussianNaiveBayes train_nb(const TrainingSet& ts) { return train_nb(ts.records); }

// Score = mean member probability.
struct BaggedNaiveBayes {
  std::vector<GaussianNaiveBayes> members;

  double positive_probability(const FeatureVector& x) const {
    double s = 0.0;
    for (const auto& m : members) s += m.positive_probability(x);
    return s / static_cast<double>(members.size());
  }
  friend bool operator==(const BaggedNaiveBayes&, const BaggedNaiveBayes&) = default;
};

// Member m is trained on a bootstrap resample drawn from sub-stream m of `seed`.
inline BaggedNaiveBayes train_bagged_nb(const TrainingSet& ts, int members, std::uint64_t seed) {
  if (members < 1) throw ConfigError("bagging needs at least one member");
  BaggedNaiveBayes model;
  for (int m = 0; m < members; ++m) {
    Rng rng(mix_seed(seed, static_cast<std::uint64_t>(m)));
    const auto rows = bootstrap_sample(ts.records.size(), rng);
    model.members.push_back(train_nb(ts.records, rows));
  }
  return model;
}

struct BoostStage {
  GaussianNaiveBayes learner;
  double alpha = 0.0;
  friend bool operator==(const BoostStage&, const BoostStage&) = default;
};

// Score = logistic(2 * sum_t alpha_t * h_t(x)), h_t in {-1, +1}; so the label
// at threshold 0.5 is the sign of the weighted vote.
struct AdaBoostNaiveBayes {
  std::vector<BoostStage> stages;

  double vote(const FeatureVector& x) const {
    double f = 0.0;
    for (const auto& s : stages) f += s.alpha * (s.learner.positive_probability(x) >= 0.5 ? 1.0 : -1.0);
    return f;
  }
  double positive_probability(const FeatureVector& x) const { return 1.0 / (1.0 + std::exp(-2.0 * vote(x))); }
  friend bool operator==(const AdaBoostNaiveBayes&, const AdaBoostNaiveBayes&) = default;
};

// Per-round bookkeeping, for inspection and tests.
struct AdaBoostTrace {
  std::vector<double> errors;
  std::vector<std::vector<double>> weights;  // distribution after each round
  bool fell_back = false;
};

// Stage weight for a weighted error; a perfect learner is clamped to a finite weight.
inline double adaboost_alpha(double error) {
  constexpr double kMinError = 1e-10;
  const double e = std::max(error, kMinError);
  return 0.5 * std::log((1.0 - e) / e);
}

/// AdaBoost.M1 with naive Bayes weak learners fitted on weighted resamples.
///
/// Each round draws n rows according to the current distribution, fits NB,
/// and measures the weighted error e on the full set. Boosting stops when
/// e >= 0.5 (that learner is discarded) or e == 0 (that learner is kept).
/// If the very first learner already has e >= 0.5, the model falls back to a
/// single NB fitted on all rows.
inline AdaBoostNaiveBayes train_adaboost_nb(const TrainingSet& ts, int rounds, std::uint64_t seed,
                                            AdaBoostTrace* trace = nullptr) {
  if (rounds < 1) throw ConfigError("AdaBoost needs at least one round");
  const auto& recs = ts.records;
  const std::size_t n = recs.size();
  if (ts.positives() == 0 || ts.negatives() == 0) {
    throw DegenerateTrainingSet("AdaBoost needs both classes in the training data");
  }
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  std::vector<double> cumulative(n);
  Rng rng(seed);
  AdaBoostNaiveBayes model;

  auto fallback = [&] {
    log::warn("AdaBoost: first weak learner is no better than chance; using a single naive Bayes model");
    model.stages = {{train_nb(ts), 1.0}};
    if (trace) trace->fell_back = true;
  };

  for (int t = 0; t < rounds; ++t) {
    std::partial_sum(w.begin(), w.end(), cumulative.begin());
    std::vector<std::size_t> rows(n);
    for (auto& r : rows) {
      const double u = rng.uniform() * cumulative.back();
      r = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
      r = std::min(r, n - 1);
    }
    GaussianNaiveBayes learner;
    try {
      learner = train_nb(recs, rows);
    } catch (const DegenerateTrainingSet&) {
      // the resample lost a class; treat as a failed round
      if (t == 0) fallback();
      break;
    }
    std::vector<char> wrong(n);
    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool pred = learner.positive_probability(recs[i].features) >= 0.5;
      wrong[i] = pred != (recs[i].label == Label::positive);
      if (wrong[i]) error += w[i];
    }
    if (trace) trace->errors.push_back(error);
    if (error >= 0.5) {
      if (t == 0) fallback();
      break;
    }
    const double alpha = adaboost_alpha(error);
    model.stages.push_back({learner, alpha});
    if (error == 0.0) break;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] *= std::exp(wrong[i] ? alpha : -alpha);
      total += w[i];
    }
    for (double& v : w) v /= total;
    if (trace) trace->weights.push_back(w);
  }
  return model;
}

}  // namespace keygraph
