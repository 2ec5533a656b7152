#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "keygraph/corpus.hpp"
#include "keygraph/error.hpp"
#include "keygraph/models.hpp"
#include "keygraph/porter.hpp"

namespace keygraph {

struct Keyphrase {
  std::vector<std::string> words;
  double score = 0.0;
  std::size_t first_position = 0;

  std::string text() const {
    std::string out;
    for (const auto& w : words) {
      if (!out.empty()) out += ' ';
      out += w;
    }
    return out;
  }

  friend bool operator==(const Keyphrase&, const Keyphrase&) = default;
};

enum class PhraseScoring { mean, sum, max };

namespace detail {

inline bool contains_run(const std::vector<std::string>& haystack, const std::vector<std::string>& needle) {
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

inline bool ranks_before(const Keyphrase& a, const Keyphrase& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.first_position < b.first_position;
}

}  // namespace detail

/// Phrases are maximal runs of positively predicted tokens that are adjacent
/// in the original text, i.e. not separated by a stopword, punctuation, a
/// sentence boundary or a negatively predicted token. Duplicates collapse to
/// their first occurrence, and phrases contained as a contiguous run in a
/// longer kept phrase are dropped. The result is ranked by score (descending),
/// then by first position.
inline std::vector<Keyphrase> generate_keyphrases(const Document& doc, std::span<const Prediction> predictions,
                                                  PhraseScoring scoring = PhraseScoring::mean) {
  std::unordered_map<std::string, double> positive;
  for (const auto& p : predictions) {
    if (p.label == Label::positive) positive[p.word] = p.score;
  }
  if (positive.empty()) return {};

  std::vector<Keyphrase> runs;
  std::vector<double> run_scores;
  auto close = [&] {
    if (run_scores.empty()) return;
    double s = 0.0;
    switch (scoring) {
      case PhraseScoring::mean:
        for (double v : run_scores) s += v;
        s /= static_cast<double>(run_scores.size());
        break;
      case PhraseScoring::sum:
        for (double v : run_scores) s += v;
        break;
      case PhraseScoring::max:
        s = *std::max_element(run_scores.begin(), run_scores.end());
        break;
    }
    runs.back().score = s;
    run_scores.clear();
  };

  const Token* prev = nullptr;
  for (const auto& tok : doc.tokens) {
    auto it = positive.find(tok.surface);
    if (it == positive.end()) {
      close();
      prev = nullptr;
      continue;
    }
    if (prev == nullptr || prev->segment != tok.segment) {
      close();
      runs.push_back({{}, 0.0, tok.position});
    }
    runs.back().words.push_back(tok.surface);
    run_scores.push_back(it->second);
    prev = &tok;
  }
  close();

  std::vector<Keyphrase> unique;
  std::unordered_set<std::string> seen;
  for (auto& r : runs) {
    if (seen.insert(r.text()).second) unique.push_back(std::move(r));
  }
  std::vector<char> inside(unique.size(), 0);
  for (std::size_t i = 0; i < unique.size(); ++i) {
    for (std::size_t j = 0; j < unique.size() && !inside[i]; ++j) {
      inside[i] = j != i && unique[j].words.size() > unique[i].words.size() &&
                  detail::contains_run(unique[j].words, unique[i].words);
    }
  }
  std::vector<Keyphrase> kept;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    if (!inside[i]) kept.push_back(std::move(unique[i]));
  }
  std::stable_sort(kept.begin(), kept.end(), detail::ranks_before);
  return kept;
}

// The k best phrases; all of them when fewer than k exist.
inline std::vector<Keyphrase> top_k(std::span<const Keyphrase> phrases, std::size_t k) {
  if (k < 1) throw ConfigError("top_k needs k >= 1");
  std::vector<Keyphrase> out(phrases.begin(), phrases.end());
  std::stable_sort(out.begin(), out.end(), detail::ranks_before);
  if (out.size() > k) out.resize(k);
  return out;
}

// Word-by-word stemmed form used for evaluation matching.
inline std::string stem_phrase(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += porter_stem(w);
  }
  return out;
}

// Gold phrase -> tokenized, stopword-free, stemmed form; empty if nothing survives.
inline std::string stem_gold_phrase(std::string_view phrase, const Stoplist& stoplist) {
  const Document d = preprocess(phrase, stoplist);
  std::vector<std::string> words;
  for (const auto& t : d.tokens) words.push_back(t.surface);
  return stem_phrase(words);
}

}  // namespace keygraph
