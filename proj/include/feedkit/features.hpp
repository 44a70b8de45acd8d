#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedkit/corpus.hpp"
#include "feedkit/embeddings.hpp"
#include "feedkit/textprep.hpp"

namespace feedkit {

// Canonical assembly order. Sentiment contributes two features (neg, pos).
enum class FeatureGroup : uint8_t {
  Sentiment,
  NWords,
  NStopwords,
  Tense,
  Pos,
  Keywords,
  Tfidf,
  FastText,
};

const std::string& to_string(FeatureGroup g);
FeatureGroup parse_feature_group(const std::string& s);

struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;
  // Half-open index ranges, in canonical group order.
  std::vector<std::pair<FeatureGroup, std::pair<size_t, size_t>>> groups;

  size_t size() const { return values.size(); }
};

// Lemma -> integer strength in [-5,-1] or [1,5]; zero strengths rejected.
struct SentimentLexicon {
  Language language = Language::EN;
  std::unordered_map<std::string, int> entries;
};

SentimentLexicon load_sentiment_lexicon(const std::string& data_dir, Language lang);

struct KeywordList {
  Language language = Language::EN;
  std::vector<std::string> keywords;  // lowercase lemmas, no duplicates
};

KeywordList load_keyword_list(const std::string& data_dir, Language lang);

// Smoothed tf-idf with L2 row normalization:
//   weight(t, d) = tf(t, d) * (1 + ln((1 + N) / (1 + df(t)))), rows L2-normed,
// so every output entry lies in [0, 1]. Terms are lemmas of non-punctuation
// tokens; the vocabulary keeps terms with min_df <= df <= max_df * N.
struct TfidfModel {
  std::vector<std::string> vocabulary;  // sorted, duplicate-free
  std::vector<double> idf;
  size_t min_df = 2;
  double max_df = 0.8;
  std::vector<std::string> fitted_on;  // sorted training doc ids
};

// Per-feature min-max scaler mapping train values to [0,1]; constant features
// map to 0 and out-of-range values are clipped.
struct Scaler {
  std::vector<double> mins;
  std::vector<double> maxs;
  std::vector<std::string> fitted_on;
};

size_t count_words(const ProcessedText& p);  // non-punctuation tokens
size_t count_stopwords(const ProcessedText& p, const std::set<std::string>& stopwords);

// (neg in [-5,-1], pos in [1,5]): strongest matched strength per polarity,
// (-1, +1) when nothing matches.
std::pair<int, int> score_sentiment(const ProcessedText& p, const SentimentLexicon& lex);

std::vector<double> keyword_flags(const ProcessedText& p, const KeywordList& kw);
std::vector<size_t> pos_counts(const ProcessedText& p);
std::vector<size_t> tense_counts(const ProcessedText& p);

TfidfModel fit_tfidf(const std::vector<const ProcessedText*>& train_docs,
                     const std::vector<std::string>& doc_ids, size_t min_df = 2,
                     double max_df = 0.8);
std::vector<double> transform_tfidf(const TfidfModel& model, const ProcessedText& p);

// Fitted dependencies for assemble(); a group whose pointer is null raises an
// error naming the group.
struct FeatureContext {
  const SentimentLexicon* sentiment = nullptr;
  const std::set<std::string>* stopwords = nullptr;
  const KeywordList* keywords = nullptr;
  const TfidfModel* tfidf = nullptr;
  const EmbeddingTable* embeddings = nullptr;
};

FeatureVector assemble(const ProcessedText& p, const std::vector<FeatureGroup>& spec,
                       const FeatureContext& ctx);

Scaler fit_scaler(const std::vector<FeatureVector>& train,
                  const std::vector<std::string>& doc_ids);
FeatureVector scale(const Scaler& s, const FeatureVector& v);

}  // namespace feedkit
