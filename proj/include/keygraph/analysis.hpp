#pragma once

#include <vector>

#include "keygraph/candidates.hpp"
#include "keygraph/corpus.hpp"
#include "keygraph/features.hpp"
#include "keygraph/graph.hpp"

namespace keygraph {

struct PipelineConfig {
  CandidateConfig candidates;
  CooccurrenceCounting counting = CooccurrenceCounting::word_type;
  RankConfig rank;
};

// Everything derived from one document before classification.
struct DocumentAnalysis {
  CandidateSet candidates;
  TextGraph graph;
  std::vector<FeatureRecord> features;  // empty when no two candidates co-occur
};

inline DocumentAnalysis analyze(const Document& doc, const PipelineConfig& cfg = {}) {
  DocumentAnalysis a;
  a.candidates = select_candidates(doc, cfg.candidates);
  a.graph = build_graph(doc, a.candidates, cfg.counting);
  a.features = build_feature_records(a.graph, cfg.rank);
  return a;
}

}  // namespace keygraph
