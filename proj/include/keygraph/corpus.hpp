#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "keygraph/error.hpp"
#include "keygraph/log.hpp"
#include "keygraph/parallel.hpp"
#include "keygraph/stoplist.hpp"
#include "keygraph/unicode.hpp"

namespace keygraph {

struct Token {
  std::string surface;            // lowercased
  std::size_t position = 0;       // 1-based, stopword-removed stream
  std::size_t raw_position = 0;   // 1-based, stream including stopwords
  // Tokens separated only by whitespace share a segment. Stopwords,
  // punctuation and sentence ends start a new one.
  std::size_t segment = 0;
};

// A sentence is a contiguous slice of Document::tokens.
struct Sentence {
  std::size_t index = 0;
  std::size_t first = 0;
  std::size_t count = 0;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::vector<Sentence> sentences;
  std::vector<Token> tokens;
  std::size_t raw_length = 0;  // token count before stopword removal
  std::vector<std::string> gold_phrases;

  std::span<const Token> sentence_tokens(std::size_t i) const {
    const auto& s = sentences[i];
    return std::span<const Token>(tokens).subspan(s.first, s.count);
  }
};

struct Corpus {
  std::string name;
  std::vector<Document> documents;
  std::string stoplist_id;
  std::size_t skipped_empty = 0;
  std::size_t skipped_malformed = 0;
};

// Splits text into sentences and lowercased tokens and drops stopwords.
//
// Tokens are maximal runs of word characters, where a hyphen between two word
// characters is kept inside the token. A sentence ends at one of . ! ? … ।
// when followed by whitespace or end of text. Sentences left without tokens
// are dropped, so sentence indices stay contiguous.
inline Document preprocess(std::string_view raw_text, const Stoplist& stoplist, std::string id = {}) {
  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::string(raw_text);

  std::vector<char32_t> cps;
  cps.reserve(raw_text.size());
  for (std::size_t pos = 0; pos < raw_text.size();) {
    const char32_t cp = unicode::decode(raw_text, pos);
    cps.push_back(cp == unicode::kInvalid ? U' ' : cp);
  }

  std::size_t segment = 0;
  std::size_t sentence_first = 0;
  std::string current;

  auto close_sentence = [&] {
    if (doc.tokens.size() > sentence_first) {
      doc.sentences.push_back({doc.sentences.size(), sentence_first, doc.tokens.size() - sentence_first});
    }
    sentence_first = doc.tokens.size();
    ++segment;
  };
  auto flush_token = [&] {
    if (current.empty()) return;
    ++doc.raw_length;
    if (stoplist.contains(current)) {
      ++segment;
    } else {
      doc.tokens.push_back({current, doc.tokens.size() + 1, doc.raw_length, segment});
    }
    current.clear();
  };

  for (std::size_t i = 0; i < cps.size(); ++i) {
    const char32_t c = cps[i];
    if (unicode::is_word_char(c)) {
      unicode::append_utf8(current, unicode::to_lower(c));
      continue;
    }
    if (unicode::is_hyphen(c) && !current.empty() && i + 1 < cps.size() &&
        unicode::is_word_char(cps[i + 1])) {
      unicode::append_utf8(current, c);
      continue;
    }
    flush_token();
    if (unicode::is_space(c)) continue;
    if (unicode::is_sentence_terminator(c) && (i + 1 == cps.size() || unicode::is_space(cps[i + 1]))) {
      close_sentence();
    } else {
      ++segment;
    }
  }
  flush_token();
  close_sentence();
  return doc;
}

namespace detail {

inline bool read_file(const std::filesystem::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::stringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  if (out.size() >= 3 && out.compare(0, 3, "\xEF\xBB\xBF") == 0) out.erase(0, 3);
  return true;
}

}  // namespace detail

// One phrase per line (LF or CRLF); `;` also separates phrases. Phrases are
// trimmed, lowercased and deduplicated in first-seen order.
inline std::vector<std::string> parse_gold_phrases(std::string_view text) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find_first_of("\n;", start);
    if (end == std::string_view::npos) end = text.size();
    auto phrase = unicode::to_lower(unicode::trim(text.substr(start, end - start)));
    if (!phrase.empty() && seen.insert(phrase).second) out.push_back(std::move(phrase));
    start = end + 1;
  }
  return out;
}

// Default corpus name: the directory's own name, ignoring a trailing slash.
inline std::string corpus_name(const std::filesystem::path& root) {
  auto normal = root.lexically_normal();
  if (!normal.has_filename()) normal = normal.parent_path();
  return normal.filename().string();
}

// Loads `<root>/<id>.txt` documents with optional `<id>.key` gold lists.
// Documents are sorted by id. Empty and malformed files are skipped with a warning.
inline Corpus load_corpus(const std::filesystem::path& root, const Stoplist& stoplist,
                          std::string name = {}, std::string stoplist_id = "english",
                          unsigned jobs = 1) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw DataError("cannot read corpus directory " + root.string());

  std::vector<fs::path> texts;
  for (fs::directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".txt") texts.push_back(it->path());
  }
  if (ec) throw DataError("cannot list corpus directory " + root.string() + ": " + ec.message());
  std::sort(texts.begin(), texts.end(),
            [](const fs::path& a, const fs::path& b) { return a.stem().string() < b.stem().string(); });

  enum class Outcome { ok, empty, malformed };
  std::vector<Document> docs(texts.size());
  std::vector<Outcome> outcome(texts.size(), Outcome::ok);
  parallel_for(texts.size(), jobs, [&](std::size_t i) {
    std::string text;
    if (!detail::read_file(texts[i], text) || !unicode::is_valid_utf8(text)) {
      outcome[i] = Outcome::malformed;
      return;
    }
    if (unicode::trim(text).empty()) {
      outcome[i] = Outcome::empty;
      return;
    }
    std::vector<std::string> gold;
    auto key_path = texts[i];
    key_path.replace_extension(".key");
    if (fs::exists(key_path)) {
      std::string key_text;
      if (!detail::read_file(key_path, key_text) || !unicode::is_valid_utf8(key_text)) {
        outcome[i] = Outcome::malformed;
        return;
      }
      gold = parse_gold_phrases(key_text);
    }
    docs[i] = preprocess(text, stoplist, texts[i].stem().string());
    docs[i].gold_phrases = std::move(gold);
  });

  Corpus corpus;
  if (name.empty()) name = corpus_name(root);
  corpus.name = std::move(name);
  corpus.stoplist_id = std::move(stoplist_id);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    switch (outcome[i]) {
      case Outcome::ok:
        corpus.documents.push_back(std::move(docs[i]));
        break;
      case Outcome::empty:
        ++corpus.skipped_empty;
        break;
      case Outcome::malformed:
        ++corpus.skipped_malformed;
        log::warn("skipping unreadable or malformed UTF-8 document " + texts[i].string());
        break;
    }
  }
  if (corpus.skipped_empty > 0) {
    log::warn(std::to_string(corpus.skipped_empty) + " empty document(s) skipped in " + root.string());
  }
  return corpus;
}

}  // namespace keygraph
