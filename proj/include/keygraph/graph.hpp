#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "keygraph/candidates.hpp"
#include "keygraph/corpus.hpp"

namespace keygraph {

struct Edge {
  std::size_t to = 0;
  double weight = 0.0;
};

// Undirected weighted graph with sorted adjacency lists. No self-loops.
class WeightedGraph {
 public:
  WeightedGraph() = default;
  explicit WeightedGraph(std::size_t nodes) : adjacency_(nodes) {}

  std::size_t node_count() const { return adjacency_.size(); }
  std::size_t edge_count() const {
    std::size_t degrees = 0;
    for (const auto& a : adjacency_) degrees += a.size();
    return degrees / 2;
  }
  bool empty() const { return adjacency_.empty(); }

  std::span<const Edge> neighbors(std::size_t node) const { return adjacency_[node]; }
  std::size_t degree(std::size_t node) const { return adjacency_[node].size(); }

  double weight(std::size_t a, std::size_t b) const {
    const auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Edge& e, std::size_t v) { return e.to < v; });
    return it != adj.end() && it->to == b ? it->weight : 0.0;
  }
  bool has_edge(std::size_t a, std::size_t b) const { return weight(a, b) > 0.0; }

  // Adds `w` to edge {a, b}; self-loops and non-positive weights are ignored.
  void add_edge(std::size_t a, std::size_t b, double w = 1.0) {
    if (a == b || w <= 0.0) return;
    bump(a, b, w);
    bump(b, a, w);
  }

 private:
  void bump(std::size_t a, std::size_t b, double w) {
    auto& adj = adjacency_[a];
    auto it = std::lower_bound(adj.begin(), adj.end(), b,
                               [](const Edge& e, std::size_t v) { return e.to < v; });
    if (it != adj.end() && it->to == b) {
      it->weight += w;
    } else {
      adj.insert(it, Edge{b, w});
    }
  }

  std::vector<std::vector<Edge>> adjacency_;
};

// Co-occurrence graph over candidate words. Nodes are ordered by word.
struct TextGraph {
  std::vector<std::string> words;
  WeightedGraph graph;
  std::vector<std::vector<std::size_t>> positions;  // per node, stopword-removed stream

  std::size_t size() const { return words.size(); }
  bool empty() const { return words.empty(); }
};

// How much one window adds to an edge: 1 if both word types appear (default),
// or the product of their token counts in the window.
enum class CooccurrenceCounting { word_type, token_instance };

// Windows are consecutive sentence pairs; a one-sentence document is one window.
// Isolated candidates are dropped.
inline TextGraph build_graph(const Document& doc, const CandidateSet& cand,
                             CooccurrenceCounting counting = CooccurrenceCounting::word_type) {
  TextGraph out;
  if (cand.empty() || doc.sentences.empty()) return out;

  std::vector<std::string> words;
  words.reserve(cand.size());
  for (const auto& c : cand.candidates) words.push_back(c.word);
  std::sort(words.begin(), words.end());
  std::unordered_map<std::string, std::size_t> id;
  for (std::size_t i = 0; i < words.size(); ++i) id.emplace(words[i], i);

  // Candidate ids per sentence, with counts.
  std::vector<std::map<std::size_t, std::size_t>> sentence_words(doc.sentences.size());
  for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
    for (const auto& tok : doc.sentence_tokens(s)) {
      if (auto it = id.find(tok.surface); it != id.end()) ++sentence_words[s][it->second];
    }
  }

  WeightedGraph full(words.size());
  auto add_window = [&](const std::map<std::size_t, std::size_t>& window) {
    for (auto a = window.begin(); a != window.end(); ++a) {
      for (auto b = std::next(a); b != window.end(); ++b) {
        const double w = counting == CooccurrenceCounting::word_type
                             ? 1.0
                             : static_cast<double>(a->second * b->second);
        full.add_edge(a->first, b->first, w);
      }
    }
  };
  if (sentence_words.size() == 1) {
    add_window(sentence_words.front());
  } else {
    for (std::size_t s = 0; s + 1 < sentence_words.size(); ++s) {
      auto window = sentence_words[s];
      for (const auto& [w, c] : sentence_words[s + 1]) window[w] += c;
      add_window(window);
    }
  }

  std::vector<std::size_t> remap(words.size(), SIZE_MAX);
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (full.degree(i) == 0) continue;
    remap[i] = out.words.size();
    out.words.push_back(words[i]);
  }
  out.graph = WeightedGraph(out.words.size());
  out.positions.resize(out.words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (remap[i] == SIZE_MAX) continue;
    for (const auto& e : full.neighbors(i)) {
      if (i < e.to) out.graph.add_edge(remap[i], remap[e.to], e.weight);
    }
  }
  for (const auto& tok : doc.tokens) {
    if (auto it = id.find(tok.surface); it != id.end() && remap[it->second] != SIZE_MAX) {
      out.positions[remap[it->second]].push_back(tok.position);
    }
  }
  return out;
}

// Debug export: `word1 TAB word2 TAB weight`, one line per edge, word1 < word2.
inline void write_edge_list(std::ostream& os, const TextGraph& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& e : g.graph.neighbors(i)) {
      if (i < e.to) os << g.words[i] << '\t' << g.words[e.to] << '\t' << e.weight << '\n';
    }
  }
}

}  // namespace keygraph
