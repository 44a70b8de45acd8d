#include "feedkit/features.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <limits>
#include <unordered_set>

namespace feedkit {

namespace {

const std::string kGroupNames[] = {"sentiment", "n_words",  "n_stopwords", "tense",
                                   "pos",       "keywords", "tfidf",       "fasttext"};

}  // namespace

const std::string& to_string(FeatureGroup g) { return kGroupNames[static_cast<size_t>(g)]; }

FeatureGroup parse_feature_group(const std::string& s) {
  for (size_t i = 0; i < 8; ++i)
    if (kGroupNames[i] == s) return static_cast<FeatureGroup>(i);
  throw InputError("unknown feature group '" + s + "'");
}

SentimentLexicon load_sentiment_lexicon(const std::string& data_dir, Language lang) {
  std::string path = data_dir + "/" + (lang == Language::EN ? "en" : "it") + "/sentiment.tsv";
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon " + path);
  SentimentLexicon lex;
  lex.language = lang;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t tab = line.find('\t');
    std::string where = path + ":" + std::to_string(lineno);
    if (tab == std::string::npos) throw InputError(where + ": expected lemma<TAB>strength");
    int strength = 0;
    try {
      strength = std::stoi(line.substr(tab + 1));
    } catch (const std::exception&) {
      throw InputError(where + ": strength is not an integer");
    }
    if (strength == 0 || strength < -5 || strength > 5)
      throw InputError(where + ": strength must be in [-5,-1] or [1,5]");
    if (!lex.entries.emplace(line.substr(0, tab), strength).second)
      throw InputError(where + ": duplicate lemma");
  }
  return lex;
}

KeywordList load_keyword_list(const std::string& data_dir, Language lang) {
  std::string path = data_dir + "/" + (lang == Language::EN ? "en" : "it") + "/keywords.txt";
  std::ifstream in(path);
  if (!in) throw InputError("cannot open keyword list " + path);
  KeywordList kw;
  kw.language = lang;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line != lowercase(line))
      throw InputError(path + ":" + std::to_string(lineno) + ": keywords must be lowercase");
    if (!seen.insert(line).second)
      throw InputError(path + ":" + std::to_string(lineno) + ": duplicate keyword");
    kw.keywords.push_back(line);
  }
  return kw;
}

size_t count_words(const ProcessedText& p) {
  size_t n = 0;
  for (const auto& tok : p.tokens)
    if (!is_punctuation_token(tok.surface)) ++n;
  return n;
}

size_t count_stopwords(const ProcessedText& p, const std::set<std::string>& stopwords) {
  size_t n = 0;
  for (const auto& tok : p.tokens)
    if (stopwords.count(tok.surface)) ++n;
  return n;
}

std::pair<int, int> score_sentiment(const ProcessedText& p, const SentimentLexicon& lex) {
  if (p.language != lex.language)
    throw InputError("sentiment lexicon language does not match document language");
  int neg = -1, pos = 1;
  for (const auto& lemma : p.lemmas) {
    auto it = lex.entries.find(lemma);
    if (it == lex.entries.end()) continue;
    if (it->second < 0)
      neg = std::min(neg, it->second);
    else
      pos = std::max(pos, it->second);
  }
  return {neg, pos};
}

std::vector<double> keyword_flags(const ProcessedText& p, const KeywordList& kw) {
  std::unordered_set<std::string> lemmas(p.lemmas.begin(), p.lemmas.end());
  std::vector<double> flags(kw.keywords.size(), 0.0);
  for (size_t i = 0; i < kw.keywords.size(); ++i)
    if (lemmas.count(kw.keywords[i])) flags[i] = 1.0;
  return flags;
}

std::vector<size_t> pos_counts(const ProcessedText& p) {
  std::vector<size_t> counts(pos_tag_count(p.language), 0);
  for (const auto& tok : p.tokens) counts[tok.pos.index]++;
  return counts;
}

std::vector<size_t> tense_counts(const ProcessedText& p) {
  return detect_tense(p.tokens, p.language);
}

namespace {

std::vector<std::string> tfidf_terms(const ProcessedText& p) {
  std::vector<std::string> terms;
  for (const auto& tok : p.tokens)
    if (!is_punctuation_token(tok.surface)) terms.push_back(tok.lemma);
  return terms;
}

}  // namespace

TfidfModel fit_tfidf(const std::vector<const ProcessedText*>& train_docs,
                     const std::vector<std::string>& doc_ids, size_t min_df, double max_df) {
  if (train_docs.empty()) throw InputError("tf-idf requires a non-empty training corpus");
  std::unordered_map<std::string, size_t> df;
  for (const auto* doc : train_docs) {
    std::unordered_set<std::string> seen;
    for (const auto& t : tfidf_terms(*doc))
      if (seen.insert(t).second) df[t]++;
  }
  const double n = static_cast<double>(train_docs.size());
  TfidfModel model;
  model.min_df = min_df;
  model.max_df = max_df;
  for (const auto& [term, count] : df)
    if (count >= min_df && static_cast<double>(count) <= max_df * n + 1e-9)
      model.vocabulary.push_back(term);
  std::sort(model.vocabulary.begin(), model.vocabulary.end());
  model.idf.reserve(model.vocabulary.size());
  for (const auto& term : model.vocabulary)
    model.idf.push_back(1.0 + std::log((1.0 + n) / (1.0 + static_cast<double>(df[term]))));
  model.fitted_on = doc_ids;
  std::sort(model.fitted_on.begin(), model.fitted_on.end());
  return model;
}

std::vector<double> transform_tfidf(const TfidfModel& model, const ProcessedText& p) {
  std::vector<double> weights(model.vocabulary.size(), 0.0);
  std::unordered_map<std::string, size_t> tf;
  for (const auto& t : tfidf_terms(p)) tf[t]++;
  for (size_t i = 0; i < model.vocabulary.size(); ++i) {
    auto it = tf.find(model.vocabulary[i]);
    if (it != tf.end()) weights[i] = static_cast<double>(it->second) * model.idf[i];
  }
  double norm = 0.0;
  for (double w : weights) norm += w * w;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& w : weights) w /= norm;
  }
  return weights;
}

FeatureVector assemble(const ProcessedText& p, const std::vector<FeatureGroup>& spec,
                       const FeatureContext& ctx) {
  if (spec.empty()) throw InputError("empty feature combination");
  std::vector<FeatureGroup> groups = spec;
  std::sort(groups.begin(), groups.end());
  if (std::adjacent_find(groups.begin(), groups.end()) != groups.end())
    throw InputError("duplicate feature group in combination");

  FeatureVector fv;
  auto require = [&](const void* dep, FeatureGroup g) {
    if (dep == nullptr)
      throw InputError("missing fitted dependency for feature group '" + to_string(g) + "'");
  };
  for (FeatureGroup g : groups) {
    size_t begin = fv.values.size();
    switch (g) {
      case FeatureGroup::Sentiment: {
        require(ctx.sentiment, g);
        auto [neg, pos] = score_sentiment(p, *ctx.sentiment);
        assert(neg >= -5 && neg <= -1 && pos >= 1 && pos <= 5);
        fv.names.push_back("sentiment_neg");
        fv.values.push_back(neg);
        fv.names.push_back("sentiment_pos");
        fv.values.push_back(pos);
        break;
      }
      case FeatureGroup::NWords:
        fv.names.push_back("n_words");
        fv.values.push_back(static_cast<double>(count_words(p)));
        break;
      case FeatureGroup::NStopwords:
        require(ctx.stopwords, g);
        fv.names.push_back("n_stopwords");
        fv.values.push_back(static_cast<double>(count_stopwords(p, *ctx.stopwords)));
        break;
      case FeatureGroup::Tense: {
        auto counts = tense_counts(p);
        const auto& names = tense_names(p.language);
        for (size_t i = 0; i < counts.size(); ++i) {
          fv.names.push_back("tense_" + names[i]);
          fv.values.push_back(static_cast<double>(counts[i]));
        }
        break;
      }
      case FeatureGroup::Pos: {
        auto counts = pos_counts(p);
        const auto& names = pos_tag_names(p.language);
        for (size_t i = 0; i < counts.size(); ++i) {
          fv.names.push_back("pos_" + names[i]);
          fv.values.push_back(static_cast<double>(counts[i]));
        }
        break;
      }
      case FeatureGroup::Keywords: {
        require(ctx.keywords, g);
        if (ctx.keywords->language != p.language)
          throw InputError("keyword list language does not match document language");
        auto flags = keyword_flags(p, *ctx.keywords);
        for (size_t i = 0; i < flags.size(); ++i) {
          assert(flags[i] == 0.0 || flags[i] == 1.0);
          fv.names.push_back("keyword_" + ctx.keywords->keywords[i]);
          fv.values.push_back(flags[i]);
        }
        break;
      }
      case FeatureGroup::Tfidf: {
        require(ctx.tfidf, g);
        auto weights = transform_tfidf(*ctx.tfidf, p);
        for (size_t i = 0; i < weights.size(); ++i) {
          assert(weights[i] >= 0.0 && weights[i] <= 1.0 + 1e-12);
          fv.names.push_back("tfidf_" + ctx.tfidf->vocabulary[i]);
          fv.values.push_back(weights[i]);
        }
        break;
      }
      case FeatureGroup::FastText: {
        require(ctx.embeddings, g);
        auto vec = document_vector(*ctx.embeddings, p);
        for (size_t i = 0; i < vec.size(); ++i) {
          fv.names.push_back("fasttext_" + std::to_string(i));
          fv.values.push_back(vec[i]);
        }
        break;
      }
    }
    fv.groups.emplace_back(g, std::make_pair(begin, fv.values.size()));
  }
  return fv;
}

Scaler fit_scaler(const std::vector<FeatureVector>& train,
                  const std::vector<std::string>& doc_ids) {
  if (train.empty()) throw InputError("scaler requires a non-empty training matrix");
  size_t dim = train.front().size();
  Scaler s;
  s.mins.assign(dim, std::numeric_limits<double>::infinity());
  s.maxs.assign(dim, -std::numeric_limits<double>::infinity());
  for (const auto& row : train) {
    if (row.size() != dim) throw InputError("scaler: inconsistent feature dimensions");
    for (size_t i = 0; i < dim; ++i) {
      s.mins[i] = std::min(s.mins[i], row.values[i]);
      s.maxs[i] = std::max(s.maxs[i], row.values[i]);
    }
  }
  s.fitted_on = doc_ids;
  std::sort(s.fitted_on.begin(), s.fitted_on.end());
  return s;
}

FeatureVector scale(const Scaler& s, const FeatureVector& v) {
  if (v.size() != s.mins.size())
    throw InputError("scaler dimension mismatch: " + std::to_string(v.size()) + " vs " +
                     std::to_string(s.mins.size()));
  FeatureVector out = v;
  for (size_t i = 0; i < v.size(); ++i) {
    double range = s.maxs[i] - s.mins[i];
    double x = range > 0.0 ? (v.values[i] - s.mins[i]) / range : 0.0;
    out.values[i] = std::clamp(x, 0.0, 1.0);
  }
  return out;
}

}  // namespace feedkit
