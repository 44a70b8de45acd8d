#include "feedkit/presets.hpp"

#include <sstream>

namespace feedkit {

namespace {

using G = FeatureGroup;

Preset trad(const std::string& dataset, Language lang, LabelClass positive,
            ClassifierConfig clf, FeatureCombo features, bool sampling, bool scaling) {
  Preset p;
  p.name = "trad/" + dataset + "/" + to_string(positive);
  p.approach = Approach::Traditional;
  p.dataset = dataset;
  p.language = lang;
  p.positive = positive;
  p.classifier = std::move(clf);
  p.features = std::move(features);
  p.sampling = sampling;
  p.scaling = scaling;
  return p;
}

Preset deep(const std::string& dataset, Language lang, LabelClass positive, size_t dense,
            size_t kernel, size_t filters) {
  Preset p;
  p.name = "dl/" + dataset + "/" + to_string(positive);
  p.approach = Approach::Deep;
  p.dataset = dataset;
  p.language = lang;
  p.positive = positive;
  p.sampling = true;
  p.scaling = true;
  p.dense_units = dense;
  p.kernel_size = kernel;
  p.number_filters = filters;
  return p;
}

ClassifierConfig rf(MaxFeatures mf, size_t n_estimators) {
  ClassifierConfig c;
  c.algorithm = Algorithm::RandomForest;
  c.rf.max_features = mf;
  c.rf.n_estimators = n_estimators;
  return c;
}

ClassifierConfig dt(SplitCriterion crit, size_t max_depth, size_t min_leaf, size_t min_split,
                    Splitter splitter) {
  ClassifierConfig c;
  c.algorithm = Algorithm::DecisionTree;
  c.dt = DtParams{crit, max_depth, min_leaf, min_split, splitter};
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> presets;

  presets.push_back(trad("app_review_EN", Language::EN, LabelClass::ProblemReport,
                         rf(MaxFeatures::None, 500), make_combo({G::Sentiment, G::Tfidf}), true,
                         false));
  presets.push_back(trad("app_review_EN", Language::EN, LabelClass::Inquiry,
                         dt(SplitCriterion::Gini, 1, 1, 4, Splitter::Random),
                         make_combo({G::Tfidf, G::Keywords}), false, false));
  presets.push_back(trad(
      "app_review_EN", Language::EN, LabelClass::Irrelevant,
      dt(SplitCriterion::Gini, 8, 2, 4, Splitter::Random),
      make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords, G::Tfidf}), false,
      false));

  presets.push_back(trad("tweet_EN", Language::EN, LabelClass::ProblemReport,
                         rf(MaxFeatures::Auto, 1000), make_combo({G::Sentiment, G::Tfidf}), true,
                         true));
  presets.push_back(trad("tweet_EN", Language::EN, LabelClass::Inquiry,
                         dt(SplitCriterion::Gini, 1, 1, 2, Splitter::Best),
                         make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords,
                                     G::Tfidf, G::FastText}),
                         true, true));
  presets.push_back(trad("tweet_EN", Language::EN, LabelClass::Irrelevant,
                         rf(MaxFeatures::None, 1000),
                         make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords,
                                     G::FastText}),
                         true, false));

  presets.push_back(trad("tweet_IT", Language::IT, LabelClass::ProblemReport,
                         rf(MaxFeatures::Log2, 1000),
                         make_combo({G::Sentiment, G::NWords, G::NStopwords, G::Tense, G::Pos,
                                     G::Tfidf}),
                         true, true));
  presets.push_back(trad("tweet_IT", Language::IT, LabelClass::Inquiry,
                         dt(SplitCriterion::Entropy, 8, 10, 6, Splitter::Random),
                         make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords}),
                         true, false));
  presets.push_back(trad("tweet_IT", Language::IT, LabelClass::Irrelevant,
                         dt(SplitCriterion::Entropy, 8, 8, 2, Splitter::Random),
                         make_combo({G::Sentiment, G::NWords, G::NStopwords, G::Tense, G::Pos,
                                     G::Tfidf, G::Keywords}),
                         false, true));

  presets.push_back(deep("app_review_EN", Language::EN, LabelClass::ProblemReport, 32, 3, 16));
  presets.push_back(deep("app_review_EN", Language::EN, LabelClass::Inquiry, 32, 5, 16));
  presets.push_back(deep("app_review_EN", Language::EN, LabelClass::Irrelevant, 32, 5, 16));
  presets.push_back(deep("tweet_EN", Language::EN, LabelClass::ProblemReport, 32, 5, 16));
  presets.push_back(deep("tweet_EN", Language::EN, LabelClass::Inquiry, 16, 5, 16));
  presets.push_back(deep("tweet_EN", Language::EN, LabelClass::Irrelevant, 32, 5, 16));
  presets.push_back(deep("tweet_IT", Language::IT, LabelClass::ProblemReport, 32, 5, 16));
  presets.push_back(deep("tweet_IT", Language::IT, LabelClass::Inquiry, 32, 5, 16));
  presets.push_back(deep("tweet_IT", Language::IT, LabelClass::Irrelevant, 32, 5, 16));

  return presets;
}

}  // namespace

const std::vector<Preset>& all_presets() {
  static const std::vector<Preset> presets = build_presets();
  return presets;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& p : all_presets()) names.push_back(p.name);
  return names;
}

const Preset& load_preset(const std::string& name) {
  for (const auto& p : all_presets())
    if (p.name == name) return p;
  std::ostringstream ss;
  ss << "unknown preset '" << name << "'; available presets:";
  for (const auto& p : all_presets()) ss << "\n  " << p.name;
  throw InputError(ss.str());
}

}  // namespace feedkit
