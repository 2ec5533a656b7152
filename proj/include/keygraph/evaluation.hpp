#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <ranges>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "keygraph/corpus.hpp"
#include "keygraph/error.hpp"
#include "keygraph/extraction.hpp"
#include "keygraph/log.hpp"
#include "keygraph/models.hpp"
#include "keygraph/parallel.hpp"
#include "keygraph/phrases.hpp"
#include "keygraph/random.hpp"
#include "keygraph/training.hpp"

namespace keygraph {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static Metrics from_counts(std::size_t hits, std::size_t predicted, std::size_t gold) {
    Metrics m;
    m.precision = predicted > 0 ? static_cast<double>(hits) / static_cast<double>(predicted) : 0.0;
    m.recall = gold > 0 ? static_cast<double>(hits) / static_cast<double>(gold) : 0.0;
    m.f1 = m.precision + m.recall > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
  }

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

// Set-based P/R/F1; duplicates in either input are ignored.
template <std::ranges::input_range Pred, std::ranges::input_range Gold>
Metrics prf(const Pred& predicted, const Gold& gold) {
  const std::set<std::string> p(std::ranges::begin(predicted), std::ranges::end(predicted));
  const std::set<std::string> g(std::ranges::begin(gold), std::ranges::end(gold));
  std::size_t hits = 0;
  for (const auto& x : p) hits += g.count(x);
  return Metrics::from_counts(hits, p.size(), g.size());
}

struct DocumentScore {
  std::string doc_id;
  Metrics metrics;
};

// Arithmetic mean of each metric over documents.
inline Metrics macro_average(std::span<const DocumentScore> docs) {
  Metrics m;
  if (docs.empty()) return m;
  for (const auto& d : docs) {
    m.precision += d.metrics.precision;
    m.recall += d.metrics.recall;
    m.f1 += d.metrics.f1;
  }
  const auto n = static_cast<double>(docs.size());
  m.precision /= n;
  m.recall /= n;
  m.f1 /= n;
  return m;
}

struct EvalReport {
  std::string corpus;
  std::string model_kind;
  std::optional<std::size_t> k;  // nullopt: word-level evaluation
  std::vector<DocumentScore> per_document;
  Metrics macro;
  std::size_t excluded_without_gold = 0;
};

struct EvalOptions {
  PipelineConfig pipeline;
  PhraseScoring scoring = PhraseScoring::mean;
  unsigned jobs = 1;
};

namespace detail {

template <class ScoreDoc>
EvalReport evaluate_corpus(const Corpus& corpus, const TrainedModel& model, const EvalOptions& opt,
                           std::optional<std::size_t> k, ScoreDoc&& score_doc) {
  EvalReport r;
  r.corpus = corpus.name;
  r.model_kind = std::string(to_string(model.kind()));
  r.k = k;
  std::vector<std::optional<DocumentScore>> slots(corpus.documents.size());
  parallel_for(corpus.documents.size(), opt.jobs, [&](std::size_t i) {
    const Document& doc = corpus.documents[i];
    if (auto m = score_doc(doc)) slots[i] = DocumentScore{doc.id, *m};
  });
  for (auto& s : slots) {
    if (s) {
      r.per_document.push_back(std::move(*s));
    } else {
      ++r.excluded_without_gold;
    }
  }
  std::sort(r.per_document.begin(), r.per_document.end(),
            [](const auto& a, const auto& b) { return a.doc_id < b.doc_id; });
  r.macro = macro_average(r.per_document);
  if (r.excluded_without_gold > 0) {
    log::warn(std::to_string(r.excluded_without_gold) + " document(s) without usable gold excluded from " +
              corpus.name);
  }
  return r;
}

}  // namespace detail

/// Word level: predicted positive words against the gold unigrams (stopwords
/// removed, exact lowercase match).
inline EvalReport evaluate_keywords(const Corpus& corpus, const TrainedModel& model, const Stoplist& stoplist,
                                    const EvalOptions& opt = {}) {
  return detail::evaluate_corpus(corpus, model, opt, std::nullopt, [&](const Document& doc) -> std::optional<Metrics> {
    std::vector<std::string> gold;
    for (const auto& w : gold_unigrams(doc.gold_phrases)) {
      if (!stoplist.contains(w)) gold.push_back(w);
    }
    if (gold.empty()) return std::nullopt;
    return prf(predict_document(doc, model, opt.pipeline).keywords(), gold);
  });
}

/// Phrase level: the top-k phrases against the gold phrases, both stemmed word by word.
inline EvalReport evaluate_keyphrases(const Corpus& corpus, const TrainedModel& model, const Stoplist& stoplist,
                                      std::size_t k, const EvalOptions& opt = {}) {
  return detail::evaluate_corpus(corpus, model, opt, k, [&](const Document& doc) -> std::optional<Metrics> {
    std::vector<std::string> gold;
    for (const auto& g : doc.gold_phrases) {
      auto s = stem_gold_phrase(g, stoplist);
      if (!s.empty()) gold.push_back(std::move(s));
    }
    if (gold.empty()) return std::nullopt;
    const auto phrases = extract_keyphrases(doc, model, opt.pipeline, opt.scoring);
    std::vector<std::string> predicted;
    for (const auto& p : top_k(phrases, k)) predicted.push_back(stem_phrase(p.words));
    return prf(predicted, gold);
  });
}

inline std::string percent(double v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

inline void write_report_table(std::ostream& os, const EvalReport& r) {
  os << "corpus     " << r.corpus << '\n';
  os << "model      " << r.model_kind << '\n';
  os << "level      " << (r.k ? "keyphrases@" + std::to_string(*r.k) : std::string("keywords")) << '\n';
  os << "documents  " << r.per_document.size() << " (excluded " << r.excluded_without_gold << ")\n";
  os << "P " << percent(r.macro.precision) << "  R " << percent(r.macro.recall) << "  F1 " << percent(r.macro.f1)
     << '\n';
}

// `doc_id precision recall f1` rows; macro values go in `#` comment lines.
inline void write_report_tsv(std::ostream& os, const EvalReport& r) {
  os << "# corpus=" << r.corpus << " model=" << r.model_kind
     << " level=" << (r.k ? "keyphrases@" + std::to_string(*r.k) : std::string("keywords")) << '\n';
  os << "# macro precision=" << format_double(r.macro.precision) << " recall=" << format_double(r.macro.recall)
     << " f1=" << format_double(r.macro.f1) << '\n';
  os << "doc_id\tprecision\trecall\tf1\n";
  for (const auto& d : r.per_document) {
    os << d.doc_id << '\t' << format_double(d.metrics.precision) << '\t' << format_double(d.metrics.recall) << '\t'
       << format_double(d.metrics.f1) << '\n';
  }
}

// Reads the f1 column of a report written by write_report_tsv.
inline std::vector<double> read_document_f1(std::istream& is) {
  std::vector<double> out;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#' || line.rfind("doc_id\t", 0) == 0) continue;
    const auto tab = line.rfind('\t');
    if (tab == std::string::npos) throw DataError("score file line without tab: " + line);
    char* end = nullptr;
    const std::string cell = line.substr(tab + 1);
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0') throw DataError("bad f1 value: " + cell);
    out.push_back(v);
  }
  return out;
}

// --- cross-validation ------------------------------------------------------

struct CrossValConfig {
  int folds = 10;
  ModelKind kind = ModelKind::gbdt;
  ModelParams params;
  std::uint64_t seed = 42;
  int smote_percentage = 200;  // 0 disables oversampling
  std::size_t smote_k = 5;
  unsigned jobs = 1;
};

struct CrossValResult {
  Metrics metrics;  // positive class, pooled over all held-out predictions
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  std::size_t true_negatives = 0;
};

// Stratified fold index per record: each class is shuffled and dealt round-robin.
inline std::vector<int> stratified_folds(const TrainingSet& ts, int folds, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < ts.records.size(); ++i) {
    (ts.records[i].label == Label::positive ? pos : neg).push_back(i);
  }
  Rng rng(seed);
  rng.shuffle(pos);
  rng.shuffle(neg);
  std::vector<int> fold(ts.records.size());
  std::size_t dealt = 0;
  for (auto* group : {&pos, &neg}) {
    for (std::size_t i : *group) fold[i] = static_cast<int>(dealt++ % static_cast<std::size_t>(folds));
  }
  if (pos.size() < static_cast<std::size_t>(folds)) {
    log::warn("cross-validation: fewer positives than folds; some folds hold no positives");
  }
  return fold;
}

/// k-fold cross-validation on an unbalanced training set. SMOTE runs inside
/// each training split only, so held-out folds never see synthetic rows.
inline CrossValResult cross_validate(const TrainingSet& ts, const CrossValConfig& cfg) {
  if (cfg.folds < 2) throw ConfigError("cross-validation needs at least two folds");
  if (static_cast<std::size_t>(cfg.folds) > ts.records.size()) throw ConfigError("more folds than records");
  if (std::any_of(ts.records.begin(), ts.records.end(), [](const auto& r) { return r.synthetic; })) {
    throw ConfigError("cross-validation input must not contain synthetic rows");
  }
  const auto fold = stratified_folds(ts, cfg.folds, cfg.seed);
  std::vector<std::vector<Label>> predicted(static_cast<std::size_t>(cfg.folds));
  std::vector<std::vector<std::size_t>> held(static_cast<std::size_t>(cfg.folds));
  for (std::size_t i = 0; i < ts.records.size(); ++i) held[static_cast<std::size_t>(fold[i])].push_back(i);

  parallel_for(static_cast<std::size_t>(cfg.folds), cfg.jobs, [&](std::size_t f) {
    TrainingSet train;
    for (std::size_t i = 0; i < ts.records.size(); ++i) {
      if (static_cast<std::size_t>(fold[i]) != f) train.records.push_back(ts.records[i]);
    }
    if (cfg.smote_percentage > 0) {
      train = smote(train, {cfg.smote_percentage, cfg.smote_k, mix_seed(cfg.seed, 2 * f)});
    }
    const auto model = train_model(train, cfg.kind, cfg.params, mix_seed(cfg.seed, 2 * f + 1));
    for (std::size_t i : held[f]) predicted[f].push_back(predict(model, ts.records[i].features).label);
  });

  CrossValResult r;
  for (std::size_t f = 0; f < held.size(); ++f) {
    for (std::size_t k = 0; k < held[f].size(); ++k) {
      const bool truth = ts.records[held[f][k]].label == Label::positive;
      const bool guess = predicted[f][k] == Label::positive;
      if (truth && guess) ++r.true_positives;
      if (!truth && guess) ++r.false_positives;
      if (truth && !guess) ++r.false_negatives;
      if (!truth && !guess) ++r.true_negatives;
    }
  }
  r.metrics = Metrics::from_counts(r.true_positives, r.true_positives + r.false_positives,
                                   r.true_positives + r.false_negatives);
  return r;
}

// --- bootstrap significance -------------------------------------------------

struct SignificanceReport {
  double delta = 0.0;  // ours - baseline, macro F1
  double p_value = 1.0;
  std::size_t samples = 0;
  std::size_t exceed_count = 0;
  double observed_mean = 0.0;
  double bootstrap_mean = 0.0;
  double bootstrap_sd = 0.0;
};

inline constexpr std::size_t kBootstrapChunk = 1 << 14;

/// Paired-bootstrap p-value against a baseline known only by its macro score.
///
/// Draws R resamples (with replacement, same size) of the per-document F1
/// vector. With baseline = mean(doc_f1) - delta, a resample counts when its
/// mean beats the baseline by at least twice the observed margin:
/// mean_i - baseline >= 2 * delta. p = count / R. Ties count, so a constant
/// vector with delta = 0 yields p = 1. Resample i is drawn from the sub-stream
/// of its fixed-size chunk, so results do not depend on `jobs`.
inline SignificanceReport bootstrap_pvalue(std::span<const double> doc_f1, double delta, std::size_t samples,
                                           std::uint64_t seed, unsigned jobs = 1) {
  if (doc_f1.empty()) throw ConfigError("bootstrap needs at least one document score");
  if (samples == 0) throw ConfigError("bootstrap sample count must be positive");
  const std::size_t n = doc_f1.size();
  double observed = 0.0;
  for (double v : doc_f1) observed += v;
  observed /= static_cast<double>(n);

  std::vector<double> means(samples);
  const std::size_t chunks = (samples + kBootstrapChunk - 1) / kBootstrapChunk;
  parallel_for(chunks, jobs, [&](std::size_t c) {
    Rng rng(mix_seed(seed, c));
    const std::size_t end = std::min(samples, (c + 1) * kBootstrapChunk);
    for (std::size_t s = c * kBootstrapChunk; s < end; ++s) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) sum += doc_f1[rng.index(n)];
      means[s] = sum / static_cast<double>(n);
    }
  });

  SignificanceReport r;
  r.delta = delta;
  r.samples = samples;
  r.observed_mean = observed;
  const double baseline = observed - delta;
  constexpr double kTie = 1e-12;
  double total = 0.0;
  for (double m : means) {
    if (m - baseline >= 2.0 * delta - kTie) ++r.exceed_count;
    total += m;
  }
  r.p_value = static_cast<double>(r.exceed_count) / static_cast<double>(samples);
  r.bootstrap_mean = total / static_cast<double>(samples);
  double ss = 0.0;
  for (double m : means) ss += (m - r.bootstrap_mean) * (m - r.bootstrap_mean);
  r.bootstrap_sd = samples > 1 ? std::sqrt(ss / static_cast<double>(samples - 1)) : 0.0;
  return r;
}

}  // namespace keygraph
