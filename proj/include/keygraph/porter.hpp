#pragma once

#include <string>
#include <string_view>

namespace keygraph {

namespace porter_detail {

// Suffix stripping over a lowercase ASCII word, following the published
// five-step rule set.
class Stemmer {
 public:
  explicit Stemmer(std::string word) : w_(std::move(word)) {}

  std::string run() {
    step1a();
    step1b();
    step1c();
    step2();
    step3();
    step4();
    step5a();
    step5b();
    return w_;
  }

 private:
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u': return false;
      case 'y': return i == 0 || !consonant(i - 1);
      default: return true;
    }
  }

  // Number of VC sequences in w_[0, len).
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i) {
      if (!consonant(i)) return true;
    }
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // consonant-vowel-consonant ending, last consonant not w, x or y
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  bool ends(std::string_view s) const {
    return std::string_view(w_).ends_with(s);
  }

  std::size_t stem_len(std::string_view suffix) const { return w_.size() - suffix.size(); }

  void replace(std::string_view suffix, std::string_view with) {
    w_.resize(stem_len(suffix));
    w_ += with;
  }

  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };

  void step1a() {
    if (ends("sses")) {
      replace("sses", "ss");
    } else if (ends("ies")) {
      replace("ies", "i");
    } else if (ends("ss")) {
    } else if (ends("s")) {
      replace("s", "");
    }
  }

  void step1b() {
    if (ends("eed")) {
      if (measure(stem_len("eed")) > 0) replace("eed", "ee");
      return;
    }
    bool stripped = false;
    if (ends("ed") && has_vowel(stem_len("ed"))) {
      replace("ed", "");
      stripped = true;
    } else if (ends("ing") && has_vowel(stem_len("ing"))) {
      replace("ing", "");
      stripped = true;
    }
    if (!stripped) return;
    if (ends("at")) {
      w_ += 'e';
    } else if (ends("bl")) {
      w_ += 'e';
    } else if (ends("iz")) {
      w_ += 'e';
    } else if (double_consonant(w_.size())) {
      const char c = w_.back();
      if (c != 'l' && c != 's' && c != 'z') w_.pop_back();
    } else if (measure(w_.size()) == 1 && cvc(w_.size())) {
      w_ += 'e';
    }
  }

  void step1c() {
    if (ends("y") && has_vowel(stem_len("y"))) w_.back() = 'i';
  }

  void step2() {
    static constexpr Rule rules[] = {
        {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},  {"anci", "ance"},  {"izer", "ize"},
        {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},  {"eli", "e"},      {"ousli", "ous"},
        {"ization", "ize"}, {"ation", "ate"},   {"ator", "ate"},   {"alism", "al"},   {"iveness", "ive"},
        {"fulness", "ful"}, {"ousness", "ous"}, {"aliti", "al"},   {"iviti", "ive"},  {"biliti", "ble"},
    };
    // Longest match first: sort by descending length within shared endings.
    for (const auto& r : rules) {
      if (ends(r.suffix) && !longer_match(rules, r.suffix)) {
        if (measure(stem_len(r.suffix)) > 0) replace(r.suffix, r.replacement);
        return;
      }
    }
  }

  void step3() {
    static constexpr Rule rules[] = {
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
        {"ical", "ic"},  {"ful", ""},   {"ness", ""},
    };
    for (const auto& r : rules) {
      if (ends(r.suffix) && !longer_match(rules, r.suffix)) {
        if (measure(stem_len(r.suffix)) > 0) replace(r.suffix, r.replacement);
        return;
      }
    }
  }

  void step4() {
    static constexpr std::string_view suffixes[] = {
        "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
        "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize",
    };
    std::string_view match;
    for (auto s : suffixes) {
      if (ends(s) && s.size() > match.size()) match = s;
    }
    if (match.empty()) return;
    const std::size_t len = stem_len(match);
    if (measure(len) <= 1) return;
    if (match == "ion" && !(len > 0 && (w_[len - 1] == 's' || w_[len - 1] == 't'))) return;
    w_.resize(len);
  }

  void step5a() {
    if (!ends("e")) return;
    const std::size_t len = w_.size() - 1;
    const int m = measure(len);
    if (m > 1 || (m == 1 && !cvc(len))) w_.pop_back();
  }

  void step5b() {
    if (measure(w_.size()) > 1 && double_consonant(w_.size()) && w_.back() == 'l') w_.pop_back();
  }

  template <std::size_t N>
  bool longer_match(const Rule (&rules)[N], std::string_view suffix) const {
    for (const auto& r : rules) {
      if (r.suffix.size() > suffix.size() && ends(r.suffix)) return true;
    }
    return false;
  }

  std::string w_;
};

inline bool is_lower_ascii_alpha(std::string_view s) {
  for (char c : s) {
    if (c < 'a' || c > 'z') return false;
  }
  return !s.empty();
}

}  // namespace porter_detail

/// Porter stemmer for lowercase ASCII words.
/// Hyphenated tokens are stemmed part by part; anything else that is not
/// lowercase ASCII letters (digits, other scripts) is returned unchanged.
inline std::string porter_stem(std::string_view word) {
  if (porter_detail::is_lower_ascii_alpha(word)) return porter_detail::Stemmer(std::string(word)).run();
  if (word.find('-') == std::string_view::npos) return std::string(word);
  std::string out;
  std::size_t start = 0;
  for (;;) {
    const auto dash = word.find('-', start);
    const auto part = word.substr(start, dash == std::string_view::npos ? std::string_view::npos : dash - start);
    out += porter_detail::is_lower_ascii_alpha(part) ? porter_detail::Stemmer(std::string(part)).run()
                                                     : std::string(part);
    if (dash == std::string_view::npos) break;
    out += '-';
    start = dash + 1;
  }
  return out;
}

}  // namespace keygraph
