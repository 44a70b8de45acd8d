#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "feedkit/features.hpp"
#include "feedkit/rng.hpp"
#include "testutil.hpp"

using namespace feedkit;

namespace {

const Lexicons& en() {
  static Lexicons lex = load_lexicons(testutil::data_dir(), Language::EN);
  return lex;
}

const Lexicons& it() {
  static Lexicons lex = load_lexicons(testutil::data_dir(), Language::IT);
  return lex;
}

const SentimentLexicon& senti_en() {
  static SentimentLexicon lex = load_sentiment_lexicon(testutil::data_dir(), Language::EN);
  return lex;
}

const KeywordList& kw_en() {
  static KeywordList kw = load_keyword_list(testutil::data_dir(), Language::EN);
  return kw;
}

const KeywordList& kw_it() {
  static KeywordList kw = load_keyword_list(testutil::data_dir(), Language::IT);
  return kw;
}

ProcessedText p_en(const std::string& text) { return process(text, Language::EN, en()); }

}  // namespace

TEST_CASE("count_words counts non-punctuation tokens") {
  CHECK(count_words(p_en("I love this app")) == 4);
  CHECK(count_words(p_en("")) == 0);
  CHECK(count_words(p_en("@x help")) == 2);  // mask token counts as a word
  CHECK(count_words(p_en("wow!!!")) == 1);
}

TEST_CASE("count_stopwords counts with multiplicity and stays below n_words") {
  std::set<std::string> the_only{"the"};
  CHECK(count_stopwords(p_en("the app the best"), the_only) == 2);
  CHECK(count_stopwords(p_en("no stop words here"), std::set<std::string>{"xyzzy"}) == 0);
  Rng rng(3);
  for (const char* text : {"the app is the best of the apps", "I can not do this", "x"}) {
    auto p = p_en(text);
    CHECK(count_stopwords(p, en().stopwords) <= count_words(p));
  }
}

TEST_CASE("score_sentiment returns the neutral floor without matches") {
  auto [neg, pos] = score_sentiment(p_en("the app opens"), senti_en());
  CHECK(neg == -1);
  CHECK(pos == 1);
}

TEST_CASE("score_sentiment picks the strongest match per polarity") {
  auto [neg, pos] = score_sentiment(p_en("I love this app"), senti_en());
  CHECK(neg == -1);
  CHECK(pos == 3);  // shipped lexicon: love -> +3
  auto [neg2, pos2] = score_sentiment(p_en("terrible crash but great support"), senti_en());
  CHECK(neg2 == -4);  // terrible -4 beats crash -3
  CHECK(pos2 == 3);   // great +3
}

TEST_CASE("score_sentiment stays within the declared bounds") {
  Rng rng(17);
  const std::vector<std::string> words = {"love",  "hate", "great", "terrible", "app",
                                          "crash", "the",  "fine",  "disgusting"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    for (size_t i = 0; i < 1 + rng.below(8); ++i) text += words[rng.below(words.size())] + " ";
    auto [neg, pos] = score_sentiment(p_en(text), senti_en());
    CHECK(neg >= -5);
    CHECK(neg <= -1);
    CHECK(pos >= 1);
    CHECK(pos <= 5);
  }
}

TEST_CASE("score_sentiment rejects language mismatches") {
  auto p = process("ottimo", Language::IT, it());
  CHECK_THROWS_AS(score_sentiment(p, senti_en()), InputError);
}

TEST_CASE("keyword_flags marks present lemmas") {
  KeywordList kw;
  kw.language = Language::EN;
  kw.keywords = {"crash", "bug"};
  auto flags = keyword_flags(p_en("app crashed"), kw);  // lemma: crash
  CHECK(flags == std::vector<double>{1.0, 0.0});
  CHECK(keyword_flags(p_en("nothing relevant"), kw) == std::vector<double>{0.0, 0.0});
}

TEST_CASE("default keyword lists have the fixed cardinalities") {
  CHECK(kw_en().keywords.size() == 60);
  CHECK(kw_it().keywords.size() == 37);
  CHECK(keyword_flags(p_en("hello"), kw_en()).size() == 60);
}

TEST_CASE("pos_counts and tense_counts have fixed lengths and partition tokens") {
  auto p = p_en("the app crashes all the time");
  auto pc = pos_counts(p);
  CHECK(pc.size() == 16);
  CHECK(std::accumulate(pc.begin(), pc.end(), size_t{0}) == p.tokens.size());
  CHECK(tense_counts(p).size() == 2);

  auto p_it = process("l'app non funziona", Language::IT, it());
  CHECK(pos_counts(p_it).size() == 18);
  CHECK(tense_counts(p_it).size() == 4);
}

TEST_CASE("tf-idf weights match the hand-computed oracle on the toy corpus") {
  // Corpus {"a b", "a c", "a d"}; df(a)=3, df(b)=df(c)=df(d)=1, N=3.
  auto d1 = p_en("a b"), d2 = p_en("a c"), d3 = p_en("a d");
  auto model = fit_tfidf({&d1, &d2, &d3}, {"d1", "d2", "d3"}, 1, 1.0);
  REQUIRE(model.vocabulary == std::vector<std::string>{"a", "b", "c", "d"});

  // Declared formula, computed independently here.
  double idf_a = 1.0 + std::log(4.0 / 4.0);
  double idf_b = 1.0 + std::log(4.0 / 2.0);
  CHECK(std::abs(model.idf[0] - idf_a) < 1e-12);
  CHECK(std::abs(model.idf[1] - idf_b) < 1e-12);
  CHECK(model.idf[0] < model.idf[1]);  // idf("a") < idf("b")

  auto w = transform_tfidf(model, d1);
  double norm = std::sqrt(idf_a * idf_a + idf_b * idf_b);
  CHECK(std::abs(w[0] - idf_a / norm) < 1e-12);
  CHECK(std::abs(w[1] - idf_b / norm) < 1e-12);
  CHECK(w[2] == 0.0);  // term absent from the document
  CHECK(w[3] == 0.0);

  // Out-of-vocabulary terms at transform time are ignored.
  auto w2 = transform_tfidf(model, p_en("a z z z"));
  CHECK(std::abs(w2[0] - 1.0) < 1e-12);  // only "a" matched, L2 norm 1
}

TEST_CASE("tf-idf outputs always lie in [0,1]") {
  std::vector<ProcessedText> docs;
  Rng rng(41);
  const std::vector<std::string> words = {"app", "crash", "fix", "love", "update", "slow"};
  for (int i = 0; i < 12; ++i) {
    std::string text;
    for (size_t j = 0; j < 1 + rng.below(10); ++j) text += words[rng.below(words.size())] + " ";
    docs.push_back(p_en(text));
  }
  std::vector<const ProcessedText*> ptrs;
  std::vector<std::string> ids;
  for (size_t i = 0; i < docs.size(); ++i) {
    ptrs.push_back(&docs[i]);
    ids.push_back("d" + std::to_string(i));
  }
  auto model = fit_tfidf(ptrs, ids, 1, 1.0);
  for (const auto& d : docs)
    for (double w : transform_tfidf(model, d)) {
      CHECK(w >= 0.0);
      CHECK(w <= 1.0 + 1e-12);
    }
}

TEST_CASE("tf-idf df bounds prune the vocabulary") {
  auto d1 = p_en("a b"), d2 = p_en("a c"), d3 = p_en("a d");
  auto model = fit_tfidf({&d1, &d2, &d3}, {"1", "2", "3"}, 2, 1.0);
  CHECK(model.vocabulary == std::vector<std::string>{"a"});  // only df >= 2
  auto model2 = fit_tfidf({&d1, &d2, &d3}, {"1", "2", "3"}, 1, 0.5);
  CHECK(model2.vocabulary == std::vector<std::string>{"b", "c", "d"});  // a: df 3 > 1.5
}

TEST_CASE("fit_tfidf rejects an empty corpus and records its fingerprint") {
  CHECK_THROWS_AS(fit_tfidf({}, {}, 1, 1.0), InputError);
  auto d1 = p_en("a b");
  auto model = fit_tfidf({&d1}, {"z-doc"}, 1, 1.0);
  CHECK(model.fitted_on == std::vector<std::string>{"z-doc"});
}

TEST_CASE("assemble concatenates groups in canonical order") {
  auto p = p_en("I love this app");
  FeatureContext ctx;
  ctx.sentiment = &senti_en();
  ctx.stopwords = &en().stopwords;
  ctx.keywords = &kw_en();
  auto d1 = p_en("a b");
  auto tfidf = fit_tfidf({&d1}, {"d1"}, 1, 1.0);
  ctx.tfidf = &tfidf;

  auto fv = assemble(p, {FeatureGroup::Tfidf, FeatureGroup::Sentiment}, ctx);
  CHECK(fv.size() == 2 + tfidf.vocabulary.size());
  REQUIRE(fv.groups.size() == 2);
  CHECK(fv.groups[0].first == FeatureGroup::Sentiment);  // canonical order
  CHECK(fv.groups[0].second == std::make_pair(size_t{0}, size_t{2}));
  CHECK(fv.names[0] == "sentiment_neg");

  auto all = assemble(p,
                      {FeatureGroup::Sentiment, FeatureGroup::NWords, FeatureGroup::NStopwords,
                       FeatureGroup::Tense, FeatureGroup::Pos, FeatureGroup::Keywords,
                       FeatureGroup::Tfidf},
                      ctx);
  CHECK(all.size() == 2 + 1 + 1 + 2 + 16 + 60 + tfidf.vocabulary.size());
}

TEST_CASE("assembled dimension matches the documented total for a 665-term vocabulary") {
  // With |vocab| = 665 and 300-dim embeddings, the full English stack is
  // 2 + 1 + 1 + 2 + 16 + 60 + 665 + 300 = 1047 features.
  TfidfModel tfidf;
  for (int i = 0; i < 665; ++i) tfidf.vocabulary.push_back("t" + std::to_string(i));
  std::sort(tfidf.vocabulary.begin(), tfidf.vocabulary.end());
  tfidf.idf.assign(665, 1.0);
  EmbeddingTable table;
  table.dimension = 300;
  FeatureContext ctx;
  ctx.sentiment = &senti_en();
  ctx.stopwords = &en().stopwords;
  ctx.keywords = &kw_en();
  ctx.tfidf = &tfidf;
  ctx.embeddings = &table;
  std::vector<FeatureGroup> all_groups;
  for (int g = 0; g < 8; ++g) all_groups.push_back(static_cast<FeatureGroup>(g));
  auto fv = assemble(p_en("I love this app"), all_groups, ctx);
  CHECK(fv.size() == 1047);
}

TEST_CASE("assemble rejects an empty spec and missing dependencies by name") {
  FeatureContext ctx;
  CHECK_THROWS_AS(assemble(p_en("x"), {}, ctx), InputError);
  CHECK_THROWS_WITH_AS(assemble(p_en("x"), {FeatureGroup::Tfidf}, ctx),
                       doctest::Contains("tfidf"), InputError);
  CHECK_THROWS_WITH_AS(assemble(p_en("x"), {FeatureGroup::FastText}, ctx),
                       doctest::Contains("fasttext"), InputError);
}

TEST_CASE("assemble is deterministic and order-stable") {
  FeatureContext ctx;
  ctx.sentiment = &senti_en();
  ctx.stopwords = &en().stopwords;
  auto p = p_en("I love this broken app");
  auto a = assemble(p, {FeatureGroup::NWords, FeatureGroup::Sentiment, FeatureGroup::NStopwords}, ctx);
  auto b = assemble(p, {FeatureGroup::NStopwords, FeatureGroup::Sentiment, FeatureGroup::NWords}, ctx);
  CHECK(a.values == b.values);
  CHECK(a.names == b.names);
}

TEST_CASE("scaler maps train min-max to [0,1] with clipping") {
  auto fv = [](double v) {
    FeatureVector f;
    f.names = {"x"};
    f.values = {v};
    return f;
  };
  auto s = fit_scaler({fv(0.0), fv(5.0), fv(10.0)}, {"a", "b", "c"});
  CHECK(scale(s, fv(0.0)).values[0] == 0.0);
  CHECK(scale(s, fv(5.0)).values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(scale(s, fv(10.0)).values[0] == 1.0);
  CHECK(scale(s, fv(12.0)).values[0] == 1.0);   // clipped
  CHECK(scale(s, fv(-3.0)).values[0] == 0.0);   // clipped
  CHECK(s.fitted_on == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("scaler maps constant features to zero and checks dimensions") {
  FeatureVector a, b;
  a.names = b.names = {"x", "y"};
  a.values = {7.0, 1.0};
  b.values = {7.0, 3.0};
  auto s = fit_scaler({a, b}, {"a", "b"});
  auto scaled = scale(s, a);
  CHECK(scaled.values[0] == 0.0);
  FeatureVector wrong;
  wrong.names = {"x"};
  wrong.values = {1.0};
  CHECK_THROWS_AS(scale(s, wrong), InputError);
}
