#pragma once

#include <vector>

#include "keygraph/analysis.hpp"
#include "keygraph/models.hpp"
#include "keygraph/phrases.hpp"

namespace keygraph {

struct DocumentPredictions {
  DocumentAnalysis analysis;
  std::vector<Prediction> predictions;  // one per graph node, in node order

  std::vector<std::string> keywords() const {
    std::vector<std::string> out;
    for (const auto& p : predictions) {
      if (p.label == Label::positive) out.push_back(p.word);
    }
    return out;
  }
};

inline DocumentPredictions predict_document(const Document& doc, const TrainedModel& model,
                                            const PipelineConfig& cfg = {}) {
  DocumentPredictions out;
  out.analysis = analyze(doc, cfg);
  out.predictions.reserve(out.analysis.features.size());
  for (const auto& rec : out.analysis.features) out.predictions.push_back(predict(model, rec.normalized, rec.word));
  return out;
}

// Full deterministic phrase ranking for one document.
inline std::vector<Keyphrase> extract_keyphrases(const Document& doc, const TrainedModel& model,
                                                 const PipelineConfig& cfg = {},
                                                 PhraseScoring scoring = PhraseScoring::mean) {
  const auto p = predict_document(doc, model, cfg);
  return generate_keyphrases(doc, p.predictions, scoring);
}

}  // namespace keygraph
