#pragma once

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "keygraph/analysis.hpp"
#include "keygraph/corpus.hpp"
#include "keygraph/error.hpp"
#include "keygraph/features.hpp"
#include "keygraph/log.hpp"
#include "keygraph/parallel.hpp"
#include "keygraph/random.hpp"

namespace keygraph {

enum class Label { negative, positive };

inline const char* to_string(Label l) { return l == Label::positive ? "positive" : "negative"; }

struct CandidateRecord {
  std::string doc_id;  // empty for synthetic rows
  std::string word;    // empty for synthetic rows
  FeatureVector features;
  Label label = Label::negative;
  bool synthetic = false;

  friend bool operator==(const CandidateRecord&, const CandidateRecord&) = default;
};

struct TrainingSet {
  std::vector<CandidateRecord> records;

  std::size_t positives() const {
    return static_cast<std::size_t>(std::count_if(records.begin(), records.end(),
                                                  [](const auto& r) { return r.label == Label::positive; }));
  }
  std::size_t negatives() const { return records.size() - positives(); }
  std::size_t size() const { return records.size(); }
};

// Unigrams of the gold list: whitespace-separated tokens of every phrase.
inline std::unordered_set<std::string> gold_unigrams(std::span<const std::string> gold_phrases) {
  std::unordered_set<std::string> out;
  for (const auto& phrase : gold_phrases) {
    std::istringstream words(phrase);
    std::string w;
    while (words >> w) out.insert(w);
  }
  return out;
}

// A word is positive iff it exactly equals a gold unigram. No stemming.
inline std::vector<CandidateRecord> label_candidates(std::span<const FeatureRecord> records,
                                                     std::span<const std::string> gold_phrases,
                                                     const std::string& doc_id = {}) {
  const auto gold = gold_unigrams(gold_phrases);
  std::vector<CandidateRecord> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({doc_id, r.word, r.normalized, gold.contains(r.word) ? Label::positive : Label::negative,
                   false});
  }
  return out;
}

// Labeled records for every document of every corpus, ordered by
// (corpus, doc id, word). Document ids are namespaced as `corpus/id`.
// Documents without gold phrases or without graph edges contribute nothing.
inline TrainingSet assemble_training_set(std::span<const Corpus> corpora, const PipelineConfig& cfg = {},
                                         unsigned jobs = 1) {
  TrainingSet ts;
  std::size_t no_gold = 0, empty_graph = 0;
  for (const auto& corpus : corpora) {
    std::vector<const Document*> docs;
    for (const auto& d : corpus.documents) docs.push_back(&d);
    std::sort(docs.begin(), docs.end(), [](auto* a, auto* b) { return a->id < b->id; });

    std::vector<std::vector<CandidateRecord>> per_doc(docs.size());
    parallel_for(docs.size(), jobs, [&](std::size_t i) {
      const Document& doc = *docs[i];
      if (doc.gold_phrases.empty()) return;
      const auto analysis = analyze(doc, cfg);
      per_doc[i] = label_candidates(analysis.features, doc.gold_phrases, corpus.name + "/" + doc.id);
      std::sort(per_doc[i].begin(), per_doc[i].end(),
                [](const auto& a, const auto& b) { return a.word < b.word; });
    });
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (docs[i]->gold_phrases.empty()) {
        ++no_gold;
      } else if (per_doc[i].empty()) {
        ++empty_graph;
      }
      for (auto& r : per_doc[i]) ts.records.push_back(std::move(r));
    }
  }
  if (no_gold > 0) log::warn(std::to_string(no_gold) + " document(s) without gold phrases excluded from training");
  if (empty_graph > 0) log::warn(std::to_string(empty_graph) + " document(s) produced an empty graph");
  return ts;
}

struct SmoteConfig {
  int percentage = 200;
  std::size_t k = 5;
  std::uint64_t seed = 42;
};

namespace detail {

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double d = 0.0;
  for (std::size_t f = 0; f < kFeatureCount; ++f) d += (a[f] - b[f]) * (a[f] - b[f]);
  return d;
}

}  // namespace detail

// Indices (into `points`) of the k nearest other points, closest first; ties by index.
inline std::vector<std::vector<std::size_t>> nearest_neighbors(std::span<const FeatureVector> points,
                                                               std::size_t k, unsigned jobs = 1) {
  std::vector<std::vector<std::size_t>> out(points.size());
  parallel_for(points.size(), jobs, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(points.size());
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (j != i) dist.emplace_back(detail::squared_distance(points[i], points[j]), j);
    }
    const std::size_t take = std::min(k, dist.size());
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take), dist.end());
    out[i].reserve(take);
    for (std::size_t t = 0; t < take; ++t) out[i].push_back(dist[t].second);
  });
  return out;
}

/// Synthetic minority oversampling.
///
/// For each positive record, in order, emits percentage/100 synthetic
/// positives at parent + gap * (neighbor - parent), where the neighbor is
/// drawn uniformly from the parent's k nearest positives (Euclidean) and
/// gap ~ U[0, 1). Original records are kept unchanged and synthetic rows are
/// appended after them.
inline TrainingSet smote(const TrainingSet& ts, const SmoteConfig& cfg = {}, unsigned jobs = 1) {
  if (cfg.percentage <= 0 || cfg.percentage % 100 != 0) {
    throw ConfigError("SMOTE percentage must be a positive multiple of 100");
  }
  if (cfg.k == 0) throw ConfigError("SMOTE k must be at least 1");
  std::vector<std::size_t> minority;
  for (std::size_t i = 0; i < ts.records.size(); ++i) {
    if (ts.records[i].label == Label::positive) minority.push_back(i);
  }
  if (minority.empty()) throw NoMinoritySamples();
  std::size_t k = cfg.k;
  if (minority.size() <= k) {
    k = minority.size() - 1;
    log::warn("SMOTE: only " + std::to_string(minority.size()) + " positive record(s); k reduced to " +
              std::to_string(k));
  }

  std::vector<FeatureVector> points;
  points.reserve(minority.size());
  for (auto i : minority) points.push_back(ts.records[i].features);
  const auto neighbors = nearest_neighbors(points, k, jobs);

  TrainingSet out = ts;
  const int per_parent = cfg.percentage / 100;
  out.records.reserve(ts.records.size() + minority.size() * static_cast<std::size_t>(per_parent));
  Rng rng(cfg.seed);
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (int r = 0; r < per_parent; ++r) {
      const FeatureVector& parent = points[p];
      const FeatureVector& other = k > 0 ? points[neighbors[p][rng.index(k)]] : parent;
      const double gap = rng.uniform();
      CandidateRecord syn;
      syn.label = Label::positive;
      syn.synthetic = true;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        syn.features[f] = parent[f] + gap * (other[f] - parent[f]);
      }
      out.records.push_back(std::move(syn));
    }
  }
  return out;
}

// --- tabular export / import ---------------------------------------------

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_feature_header(std::ostream& os, bool with_synthetic) {
  os << "doc_id\tword";
  for (auto name : kFeatureNames) os << '\t' << name;
  os << "\tlabel";
  if (with_synthetic) os << "\tsynthetic";
  os << '\n';
}

// `doc_id word strength eigen pr posr core cc label synthetic`, tab-separated.
// Synthetic rows write `-` for doc_id and word.
inline void write_training_set(std::ostream& os, const TrainingSet& ts) {
  write_feature_header(os, true);
  for (const auto& r : ts.records) {
    os << (r.synthetic ? "-" : r.doc_id) << '\t' << (r.synthetic ? "-" : r.word);
    for (double v : r.features.values) os << '\t' << format_double(v);
    os << '\t' << to_string(r.label) << '\t' << (r.synthetic ? 1 : 0) << '\n';
  }
}

// Lines starting with `#` are ignored.
inline TrainingSet read_training_set(std::istream& is) {
  TrainingSet ts;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("doc_id\t", 0) == 0) continue;
    }
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cells.size() != 2 + kFeatureCount + 2) {
      throw DataError("training set line " + std::to_string(line_no) + ": expected 10 columns");
    }
    if (cells[9] != "0" && cells[9] != "1") {
      throw DataError("training set line " + std::to_string(line_no) + ": synthetic flag must be 0 or 1");
    }
    CandidateRecord r;
    r.synthetic = cells[9] == "1";
    if (!r.synthetic) {
      r.doc_id = cells[0];
      r.word = cells[1];
    }
    for (std::size_t f = 0; f < kFeatureCount; ++f) {
      char* end = nullptr;
      r.features[f] = std::strtod(cells[2 + f].c_str(), &end);
      if (end == cells[2 + f].c_str() || *end != '\0') {
        throw DataError("training set line " + std::to_string(line_no) + ": bad number");
      }
    }
    if (cells[8] == "positive") {
      r.label = Label::positive;
    } else if (cells[8] == "negative") {
      r.label = Label::negative;
    } else {
      throw DataError("training set line " + std::to_string(line_no) + ": bad label '" + cells[8] + "'");
    }
    ts.records.push_back(std::move(r));
  }
  return ts;
}

}  // namespace keygraph
