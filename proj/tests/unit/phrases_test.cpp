#include <gtest/gtest.h>

#include <fstream>

#include "support.hpp"

using namespace keygraph;

namespace {

std::vector<Prediction> positives(std::vector<std::pair<std::string, double>> scored) {
  std::vector<Prediction> out;
  for (auto& [w, s] : scored) out.push_back({w, s, Label::positive});
  return out;
}

std::vector<std::string> texts(const std::vector<Keyphrase>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.text());
  return out;
}

Keyphrase phrase(std::string w, double score, std::size_t pos) { return {{std::move(w)}, score, pos}; }

}  // namespace

TEST(Keyphrases, AdjacentPositivesFormOnePhrase) {
  const auto d = preprocess("Complex network based keyword extraction works.", english_stoplist());
  const auto preds = positives({{"complex", 0.9}, {"network", 0.8}, {"based", 0.6}, {"keyword", 0.7}, {"extraction", 1.0}});
  const auto ps = generate_keyphrases(d, preds);
  ASSERT_EQ(ps.size(), 1u);
  EXPECT_EQ(ps[0].text(), "complex network based keyword extraction");
  EXPECT_NEAR(ps[0].score, 4.0 / 5.0, 1e-15);
  EXPECT_EQ(ps[0].first_position, 1u);
}

TEST(Keyphrases, BreaksAtNegativesStopwordsAndPunctuation) {
  const auto d = preprocess("solar panels of rooftop arrays, solar panels. rooftop grid arrays", english_stoplist());
  auto preds = positives({{"solar", 0.9}, {"panels", 0.7}, {"rooftop", 0.6}, {"arrays", 0.6}});
  preds.push_back({"grid", 0.2, Label::negative});
  const auto ps = generate_keyphrases(d, preds);
  EXPECT_EQ(texts(ps), (std::vector<std::string>{"solar panels", "rooftop arrays"}));
}

TEST(Keyphrases, ContainedPhrasesAreDropped) {
  const auto d = preprocess("network. complex network. network analysis", {});
  const auto ps = generate_keyphrases(d, positives({{"complex", 0.5}, {"network", 0.9}, {"analysis", 0.4}}));
  EXPECT_EQ(texts(ps), (std::vector<std::string>{"complex network", "network analysis"}));
  EXPECT_EQ(ps[0].first_position, 2u);
}

TEST(Keyphrases, ScoringModes) {
  const auto d = preprocess("alpha beta gamma", {});
  const auto preds = positives({{"alpha", 0.6}, {"beta", 0.9}, {"gamma", 0.9}});
  EXPECT_NEAR(generate_keyphrases(d, preds, PhraseScoring::mean)[0].score, 0.8, 1e-15);
  EXPECT_NEAR(generate_keyphrases(d, preds, PhraseScoring::sum)[0].score, 2.4, 1e-15);
  EXPECT_EQ(generate_keyphrases(d, preds, PhraseScoring::max)[0].score, 0.9);
}

TEST(Keyphrases, NoPositivesGivesNothing) {
  const auto d = preprocess("alpha beta", {});
  EXPECT_TRUE(generate_keyphrases(d, std::vector<Prediction>{{"alpha", 0.1, Label::negative}}).empty());
}

TEST(Keyphrases, DeterministicRanking) {
  Rng rng(12);
  std::vector<std::string> vocab;
  for (char c = 'a'; c <= 'p'; ++c) vocab.push_back(std::string(3, c));
  for (int trial = 0; trial < 20; ++trial) {
    std::string text;
    for (int i = 0; i < 80; ++i) text += vocab[rng.index(vocab.size())] + (rng.index(6) == 0 ? ". " : " ");
    const auto d = preprocess(text, {});
    std::vector<Prediction> preds;
    for (const auto& w : vocab) {
      const double s = static_cast<double>(rng.index(4)) / 4 + 0.25;
      preds.push_back({w, s, s >= 0.5 ? Label::positive : Label::negative});
    }
    const auto a = generate_keyphrases(d, preds);
    auto shuffled = preds;
    std::reverse(shuffled.begin(), shuffled.end());
    EXPECT_EQ(a, generate_keyphrases(d, shuffled));
    for (std::size_t i = 1; i < a.size(); ++i) {
      EXPECT_TRUE(a[i - 1].score > a[i].score ||
                  (a[i - 1].score == a[i].score && a[i - 1].first_position < a[i].first_position));
    }
  }
}

TEST(TopK, SaturatesAndBreaksTiesByPosition) {
  const std::vector<Keyphrase> ps = {phrase("c", 0.5, 9), phrase("a", 0.9, 4), phrase("b", 0.5, 2)};
  EXPECT_EQ(texts(top_k(ps, 2)), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(texts(top_k(ps, 10)), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(top_k(ps, 0), ConfigError);
}

TEST(TopK, SmallerKIsPrefix) {
  std::vector<Keyphrase> ps;
  Rng rng(2);
  for (std::size_t i = 0; i < 30; ++i) ps.push_back(phrase("p" + std::to_string(i), rng.index(5) / 4.0, i + 1));
  const auto all = top_k(ps, 30);
  for (std::size_t k = 1; k <= 30; ++k) {
    const auto some = top_k(ps, k);
    EXPECT_TRUE(std::equal(some.begin(), some.end(), all.begin()));
  }
}

TEST(Porter, ReferenceFixture) {
  std::ifstream in(KEYGRAPH_TEST_DATA "/porter_fixture.tsv");
  ASSERT_TRUE(in) << "missing porter fixture";
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto tab = line.find('\t');
    ASSERT_NE(tab, std::string::npos);
    EXPECT_EQ(porter_stem(line.substr(0, tab)), line.substr(tab + 1)) << line;
    ++rows;
  }
  EXPECT_GT(rows, 2000u);
}

TEST(Porter, ClassicCases) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"caresses", "caress"}, {"ponies", "poni"},   {"cats", "cat"},         {"relational", "relat"},
      {"hopping", "hop"},     {"filing", "file"},   {"happy", "happi"},      {"generalizations", "gener"},
      {"networks", "network"}, {"extraction", "extract"}, {"keywords", "keyword"}};
  for (const auto& [w, s] : cases) EXPECT_EQ(porter_stem(w), s) << w;
}

TEST(Porter, NonAsciiAndDigitsUnchanged) {
  EXPECT_EQ(porter_stem("मानसून"), "मानसून");
  EXPECT_EQ(porter_stem("naïve"), "naïve");
  EXPECT_EQ(porter_stem("x1"), "x1");
  EXPECT_EQ(porter_stem("grid-networks"), "grid-network");
}

TEST(Porter, StemPhrasesForMatching) {
  const std::vector<std::string> words = {"complex", "networks"};
  EXPECT_EQ(stem_phrase(words), "complex network");
  EXPECT_EQ(stem_gold_phrase("Complex Networks of the World", english_stoplist()), "complex network world");
  EXPECT_EQ(stem_gold_phrase("the of", english_stoplist()), "");
}
