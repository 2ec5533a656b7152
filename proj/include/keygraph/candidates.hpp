#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

#include "keygraph/corpus.hpp"
#include "keygraph/error.hpp"

namespace keygraph {

// Which token stream sigma-index positions and length are measured on.
enum class PositionStream { filtered, raw };

struct OccurrenceIndex {
  std::string word;
  std::vector<std::size_t> positions;  // sorted, 1-based
  std::size_t stream_length = 0;

  std::size_t count() const { return positions.size(); }
};

// Normalized standard deviation of the gaps between successive occurrences,
// with sentinels at 0 and N+1. Requires at least two occurrences.
inline double sigma_index(const OccurrenceIndex& occ) {
  const std::size_t n = occ.count();
  if (n < 2) throw InsufficientOccurrences(occ.word);
  const double mean_gap = static_cast<double>(occ.stream_length + 1) / static_cast<double>(n + 1);
  double sum_sq = 0.0;
  std::size_t prev = 0;
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t next = i < n ? occ.positions[i] : occ.stream_length + 1;
    const double dev = static_cast<double>(next - prev) - mean_gap;
    sum_sq += dev * dev;
    prev = next;
  }
  return std::sqrt(sum_sq / static_cast<double>(n - 1)) / mean_gap;
}

// Occurrence lists for every distinct token, in first-occurrence order.
inline std::vector<OccurrenceIndex> occurrence_index(const Document& doc,
                                                    PositionStream stream = PositionStream::filtered) {
  std::vector<OccurrenceIndex> out;
  std::unordered_map<std::string, std::size_t> slot;
  const std::size_t length = stream == PositionStream::raw ? doc.raw_length : doc.tokens.size();
  for (const auto& tok : doc.tokens) {
    auto [it, fresh] = slot.try_emplace(tok.surface, out.size());
    if (fresh) out.push_back({tok.surface, {}, length});
    out[it->second].positions.push_back(stream == PositionStream::raw ? tok.raw_position : tok.position);
  }
  return out;
}

enum class SelectionMode { sigma_top_third, all_words_short_doc };

struct Candidate {
  std::string word;
  double sigma = 0.0;
  std::size_t occurrences = 0;
  std::size_t first_position = 0;
};

struct CandidateSet {
  std::string doc_id;
  std::vector<Candidate> candidates;
  SelectionMode mode = SelectionMode::sigma_top_third;

  bool empty() const { return candidates.empty(); }
  std::size_t size() const { return candidates.size(); }
};

struct CandidateConfig {
  std::size_t short_doc_unique_words = 100;
  PositionStream stream = PositionStream::filtered;
};

// Keeps the top 33% (rounded up) of words occurring at least twice, ranked by
// sigma-index; documents with fewer than 100 unique words keep every word.
// Ties: more occurrences, then earlier first position, then lexicographic.
inline CandidateSet select_candidates(const Document& doc, const CandidateConfig& cfg = {}) {
  CandidateSet set;
  set.doc_id = doc.id;
  const auto index = occurrence_index(doc, cfg.stream);
  if (index.empty()) return set;

  const bool short_doc = index.size() < cfg.short_doc_unique_words;
  set.mode = short_doc ? SelectionMode::all_words_short_doc : SelectionMode::sigma_top_third;
  for (const auto& occ : index) {
    if (occ.count() < 2 && !short_doc) continue;
    const double sigma = occ.count() >= 2 ? sigma_index(occ) : 0.0;
    // first_position always refers to the stopword-removed stream
    const std::size_t first = cfg.stream == PositionStream::raw
                                  ? std::find_if(doc.tokens.begin(), doc.tokens.end(),
                                                 [&](const Token& t) { return t.surface == occ.word; })
                                        ->position
                                  : occ.positions.front();
    set.candidates.push_back({occ.word, sigma, occ.count(), first});
  }
  std::sort(set.candidates.begin(), set.candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.sigma != b.sigma) return a.sigma > b.sigma;
    if (a.occurrences != b.occurrences) return a.occurrences > b.occurrences;
    if (a.first_position != b.first_position) return a.first_position < b.first_position;
    return a.word < b.word;
  });
  if (!short_doc) {
    const std::size_t eligible = set.candidates.size();
    set.candidates.resize((33 * eligible + 99) / 100);
  }
  return set;
}

}  // namespace keygraph
