#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "feedkit/classifiers.hpp"
#include "feedkit/corpus.hpp"
#include "feedkit/embeddings.hpp"
#include "feedkit/features.hpp"
#include "feedkit/neuralnet.hpp"
#include "feedkit/textprep.hpp"

namespace feedkit {

// Static per-language resources (lexicons, sentiment, keywords) plus any
// loaded embedding tables. Immutable after load; shared read-only.
struct Resources {
  std::map<Language, Lexicons> lexicons;
  std::map<Language, SentimentLexicon> sentiment;
  std::map<Language, KeywordList> keywords;
  std::map<Language, EmbeddingTable> embeddings;

  static Resources load(const std::string& data_dir,
                        const std::vector<Language>& languages = {Language::EN, Language::IT});
  const Lexicons& lexicons_for(Language lang) const;
  const EmbeddingTable& embeddings_for(Language lang) const;
};

struct PipelineDoc {
  const FeedbackDocument* doc = nullptr;
  ProcessedText text;
};

std::vector<PipelineDoc> preprocess(const LabeledDataset& ds, const Resources& res);
std::vector<int> binary_labels(const std::vector<PipelineDoc>& docs, LabelClass positive);
Language dataset_language(const std::vector<PipelineDoc>& docs);  // rejects mixed languages

struct TfidfOptions {
  size_t min_df = 2;
  double max_df = 0.8;
};

// One fit of the featurization stack on a set of training rows. tfidf and
// scaler (when present) carry fingerprints of exactly the rows they saw.
struct FittedFeaturePipeline {
  std::vector<FeatureGroup> groups;
  bool scaling = false;
  std::optional<TfidfModel> tfidf;
  std::optional<Scaler> scaler;
  Language language = Language::EN;
  // Keyword vocabulary fixed at fit time so models stay self-contained.
  KeywordList keywords;
};

FittedFeaturePipeline fit_feature_pipeline(const std::vector<FeatureGroup>& groups, bool scaling,
                                           const std::vector<const PipelineDoc*>& train,
                                           const Resources& res, const TfidfOptions& tfidf_opts);

Matrix transform_features(const FittedFeaturePipeline& pipeline,
                          const std::vector<const PipelineDoc*>& docs, const Resources& res);

// Self-contained traditional model: featurization artifacts plus the fitted
// classifier. Static lexicons still come from the data dir at predict time.
struct TraditionalModel {
  Language language = Language::EN;
  LabelClass positive = LabelClass::ProblemReport;
  bool sampling = false;
  uint64_t seed = 0;
  FittedFeaturePipeline features;
  std::optional<EmbeddingTable> embedded_vectors;  // present iff fasttext is used
  TrainedClassifier classifier;
};

TraditionalModel fit_traditional_model(const LabeledDataset& train, LabelClass positive,
                                       const std::vector<FeatureGroup>& groups,
                                       const ClassifierConfig& clf, bool sampling, bool scaling,
                                       const Resources& res, const TfidfOptions& tfidf_opts,
                                       uint64_t seed);

std::vector<double> predict_traditional(const TraditionalModel& model,
                                        const std::vector<FeedbackDocument>& docs,
                                        const Resources& res);

// Deep model: frozen-embedding CNN plus its vocabulary. loss_history holds
// the per-batch training losses of the final fit (not persisted with the
// model; the CLI exports it as CSV).
struct DeepModel {
  Language language = Language::EN;
  LabelClass positive = LabelClass::ProblemReport;
  bool sampling = true;
  bool scaling = true;  // recorded for configuration fidelity; token input is never scaled
  uint64_t seed = 0;
  VocabIndex vocab;
  CnnModel cnn;
  std::vector<double> loss_history;
};

DeepModel fit_deep_model(const LabeledDataset& train, LabelClass positive, const CnnConfig& config,
                         bool sampling, const Resources& res, uint64_t seed);

std::vector<double> predict_deep(const DeepModel& model, const std::vector<FeedbackDocument>& docs,
                                 const Resources& res);

// Versioned persistence; loading a saved model reproduces its predictions
// bit-exactly.
nlohmann::json model_to_json(const TraditionalModel& model);
nlohmann::json model_to_json(const DeepModel& model);
void save_model(const TraditionalModel& model, const std::string& path);
void save_model(const DeepModel& model, const std::string& path);

struct LoadedModel {
  std::optional<TraditionalModel> traditional;
  std::optional<DeepModel> deep;
  Language language() const;
  LabelClass positive() const;
};

LoadedModel load_model(const std::string& path);
std::vector<double> predict_with_model(const LoadedModel& model,
                                       const std::vector<FeedbackDocument>& docs,
                                       const Resources& res);

}  // namespace feedkit
