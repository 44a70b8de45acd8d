#include "feedkit/pipeline.hpp"

#include <algorithm>
#include <fstream>

#include "feedkit/hash.hpp"

namespace feedkit {

Resources Resources::load(const std::string& data_dir, const std::vector<Language>& languages) {
  Resources res;
  for (Language lang : languages) {
    res.lexicons.emplace(lang, load_lexicons(data_dir, lang));
    res.sentiment.emplace(lang, load_sentiment_lexicon(data_dir, lang));
    res.keywords.emplace(lang, load_keyword_list(data_dir, lang));
  }
  return res;
}

const Lexicons& Resources::lexicons_for(Language lang) const {
  auto it = lexicons.find(lang);
  if (it == lexicons.end())
    throw InputError("no lexicons loaded for language " + to_string(lang));
  return it->second;
}

const EmbeddingTable& Resources::embeddings_for(Language lang) const {
  auto it = embeddings.find(lang);
  if (it == embeddings.end())
    throw InputError("no embedding table loaded for language " + to_string(lang) +
                     " (required by the fasttext feature group or the deep approach)");
  return it->second;
}

std::vector<PipelineDoc> preprocess(const LabeledDataset& ds, const Resources& res) {
  std::vector<PipelineDoc> docs;
  docs.reserve(ds.documents.size());
  for (const auto& d : ds.documents) {
    PipelineDoc pd;
    pd.doc = &d;
    pd.text = process(d.text, d.language, res.lexicons_for(d.language));
    docs.push_back(std::move(pd));
  }
  return docs;
}

std::vector<int> binary_labels(const std::vector<PipelineDoc>& docs, LabelClass positive) {
  std::vector<int> y(docs.size());
  for (size_t i = 0; i < docs.size(); ++i) y[i] = *docs[i].doc->label == positive ? 1 : 0;
  return y;
}

Language dataset_language(const std::vector<PipelineDoc>& docs) {
  if (docs.empty()) throw InputError("empty document set");
  Language lang = docs.front().doc->language;
  for (const auto& d : docs)
    if (d.doc->language != lang)
      throw InputError("mixed-language dataset: features are language-specific");
  return lang;
}

FittedFeaturePipeline fit_feature_pipeline(const std::vector<FeatureGroup>& groups, bool scaling,
                                           const std::vector<const PipelineDoc*>& train,
                                           const Resources& res, const TfidfOptions& tfidf_opts) {
  if (train.empty()) throw InputError("cannot fit a feature pipeline on zero documents");
  FittedFeaturePipeline pipe;
  pipe.groups = groups;
  std::sort(pipe.groups.begin(), pipe.groups.end());
  pipe.scaling = scaling;
  pipe.language = train.front()->doc->language;
  for (const auto* d : train)
    if (d->doc->language != pipe.language)
      throw InputError("mixed-language dataset: features are language-specific");
  pipe.keywords = res.keywords.at(pipe.language);

  if (std::find(groups.begin(), groups.end(), FeatureGroup::Tfidf) != groups.end()) {
    std::vector<const ProcessedText*> texts;
    std::vector<std::string> ids;
    for (const auto* d : train) {
      texts.push_back(&d->text);
      ids.push_back(d->doc->id);
    }
    pipe.tfidf = fit_tfidf(texts, ids, tfidf_opts.min_df, tfidf_opts.max_df);
  }
  if (scaling) {
    FittedFeaturePipeline unscaled = pipe;
    unscaled.scaling = false;
    std::vector<FeatureVector> rows;
    std::vector<std::string> ids;
    FeatureContext ctx;
    ctx.sentiment = &res.sentiment.at(pipe.language);
    ctx.stopwords = &res.lexicons_for(pipe.language).stopwords;
    ctx.keywords = &unscaled.keywords;
    ctx.tfidf = unscaled.tfidf ? &*unscaled.tfidf : nullptr;
    ctx.embeddings = res.embeddings.count(pipe.language) ? &res.embeddings.at(pipe.language) : nullptr;
    for (const auto* d : train) {
      rows.push_back(assemble(d->text, unscaled.groups, ctx));
      ids.push_back(d->doc->id);
    }
    pipe.scaler = fit_scaler(rows, ids);
  }
  return pipe;
}

Matrix transform_features(const FittedFeaturePipeline& pipeline,
                          const std::vector<const PipelineDoc*>& docs, const Resources& res) {
  FeatureContext ctx;
  ctx.sentiment = &res.sentiment.at(pipeline.language);
  ctx.stopwords = &res.lexicons_for(pipeline.language).stopwords;
  ctx.keywords = &pipeline.keywords;
  ctx.tfidf = pipeline.tfidf ? &*pipeline.tfidf : nullptr;
  ctx.embeddings =
      res.embeddings.count(pipeline.language) ? &res.embeddings.at(pipeline.language) : nullptr;

  Matrix x;
  for (size_t i = 0; i < docs.size(); ++i) {
    FeatureVector fv = assemble(docs[i]->text, pipeline.groups, ctx);
    if (pipeline.scaler) fv = scale(*pipeline.scaler, fv);
    if (i == 0) x = Matrix(docs.size(), fv.size());
    if (fv.size() != x.cols) throw Error("inconsistent feature dimension across documents");
    for (size_t j = 0; j < fv.size(); ++j) x.at(i, j) = fv.values[j];
  }
  return x;
}

TraditionalModel fit_traditional_model(const LabeledDataset& train, LabelClass positive,
                                       const std::vector<FeatureGroup>& groups,
                                       const ClassifierConfig& clf, bool sampling, bool scaling,
                                       const Resources& res, const TfidfOptions& tfidf_opts,
                                       uint64_t seed) {
  LabeledDataset effective =
      sampling ? undersample_majority(train, positive, derive_seed(seed, "final-sample")) : train;
  auto pdocs = preprocess(effective, res);
  std::vector<const PipelineDoc*> ptrs;
  for (const auto& d : pdocs) ptrs.push_back(&d);

  TraditionalModel model;
  model.language = dataset_language(pdocs);
  model.positive = positive;
  model.sampling = sampling;
  model.seed = seed;
  model.features = fit_feature_pipeline(groups, scaling, ptrs, res, tfidf_opts);
  if (std::find(groups.begin(), groups.end(), FeatureGroup::FastText) != groups.end())
    model.embedded_vectors = res.embeddings_for(model.language);

  Matrix x = transform_features(model.features, ptrs, res);
  auto y = binary_labels(pdocs, positive);
  model.classifier = fit_classifier(clf, x, y, derive_seed(seed, "final-fit"));
  model.classifier.positive_class = positive;
  return model;
}

std::vector<double> predict_traditional(const TraditionalModel& model,
                                        const std::vector<FeedbackDocument>& docs,
                                        const Resources& res) {
  // The model may carry its own embedding table; overlay it for the lookup.
  Resources local;
  const Resources* use = &res;
  if (model.embedded_vectors) {
    local.lexicons = res.lexicons;
    local.sentiment = res.sentiment;
    local.keywords = res.keywords;
    local.embeddings = res.embeddings;
    local.embeddings[model.language] = *model.embedded_vectors;
    use = &local;
  }
  std::vector<PipelineDoc> pdocs;
  pdocs.reserve(docs.size());
  for (const auto& d : docs) {
    if (d.language != model.language)
      throw InputError("document '" + d.id + "' language does not match the model");
    PipelineDoc pd;
    pd.doc = &d;
    pd.text = process(d.text, d.language, use->lexicons_for(d.language));
    pdocs.push_back(std::move(pd));
  }
  std::vector<const PipelineDoc*> ptrs;
  for (const auto& d : pdocs) ptrs.push_back(&d);
  Matrix x = transform_features(model.features, ptrs, *use);
  return predict_scores(model.classifier, x);
}

DeepModel fit_deep_model(const LabeledDataset& train, LabelClass positive, const CnnConfig& config,
                         bool sampling, const Resources& res, uint64_t seed) {
  LabeledDataset effective =
      sampling ? undersample_majority(train, positive, derive_seed(seed, "final-sample")) : train;
  auto pdocs = preprocess(effective, res);

  DeepModel model;
  model.language = dataset_language(pdocs);
  model.positive = positive;
  model.sampling = sampling;
  model.seed = seed;
  const EmbeddingTable& table = res.embeddings_for(model.language);
  CnnConfig cfg = config;
  cfg.embedding_dim = table.dimension;
  model.vocab = build_vocab_index(table);
  model.cnn = init_cnn(cfg, model.vocab, table, seed);

  std::vector<std::vector<uint32_t>> x;
  x.reserve(pdocs.size());
  for (const auto& d : pdocs) x.push_back(encode_tokens(d.text, model.vocab, cfg.input_length));
  auto y = binary_labels(pdocs, positive);
  model.loss_history = cnn_train(model.cnn, x, y, derive_seed(seed, "final-fit")).batch_loss;
  return model;
}

std::vector<double> predict_deep(const DeepModel& model, const std::vector<FeedbackDocument>& docs,
                                 const Resources& res) {
  std::vector<std::vector<uint32_t>> x;
  x.reserve(docs.size());
  for (const auto& d : docs) {
    if (d.language != model.language)
      throw InputError("document '" + d.id + "' language does not match the model");
    auto text = process(d.text, d.language, res.lexicons_for(d.language));
    x.push_back(encode_tokens(text, model.vocab, model.cnn.config.input_length));
  }
  return cnn_predict_proba(model.cnn, x);
}

namespace {

constexpr const char* kModelFormat = "feedkit-model";
constexpr int kModelVersion = 1;

nlohmann::json tfidf_to_json(const TfidfModel& m) {
  return nlohmann::json{{"vocabulary", m.vocabulary}, {"idf", m.idf},     {"min_df", m.min_df},
                        {"max_df", m.max_df},         {"fitted_on", m.fitted_on}};
}

TfidfModel tfidf_from_json(const nlohmann::json& j) {
  TfidfModel m;
  m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  m.idf = j.at("idf").get<std::vector<double>>();
  m.min_df = j.at("min_df").get<size_t>();
  m.max_df = j.at("max_df").get<double>();
  m.fitted_on = j.at("fitted_on").get<std::vector<std::string>>();
  return m;
}

nlohmann::json scaler_to_json(const Scaler& s) {
  return nlohmann::json{{"mins", s.mins}, {"maxs", s.maxs}, {"fitted_on", s.fitted_on}};
}

Scaler scaler_from_json(const nlohmann::json& j) {
  Scaler s;
  s.mins = j.at("mins").get<std::vector<double>>();
  s.maxs = j.at("maxs").get<std::vector<double>>();
  s.fitted_on = j.at("fitted_on").get<std::vector<std::string>>();
  return s;
}

nlohmann::json embeddings_to_json(const EmbeddingTable& t) {
  nlohmann::json j{{"dimension", t.dimension},
                   {"language", to_string(t.language)},
                   {"words", t.words},
                   {"ngram_min", t.ngram_min},
                   {"ngram_max", t.ngram_max},
                   {"bucket_count", t.bucket_count}};
  nlohmann::json vectors = nlohmann::json::array();
  for (const auto& v : t.vectors) vectors.push_back(v);
  j["vectors"] = vectors;
  nlohmann::json buckets = nlohmann::json::array();
  for (const auto& b : t.buckets) buckets.push_back(b);
  j["buckets"] = buckets;
  return j;
}

EmbeddingTable embeddings_from_json(const nlohmann::json& j) {
  EmbeddingTable t;
  t.dimension = j.at("dimension").get<size_t>();
  t.language = parse_language(j.at("language").get<std::string>());
  t.ngram_min = j.at("ngram_min").get<size_t>();
  t.ngram_max = j.at("ngram_max").get<size_t>();
  t.bucket_count = j.at("bucket_count").get<size_t>();
  auto words = j.at("words").get<std::vector<std::string>>();
  const auto& vectors = j.at("vectors");
  for (size_t i = 0; i < words.size(); ++i)
    t.add_word(words[i], vectors.at(i).get<std::vector<double>>());
  for (const auto& b : j.at("buckets")) t.buckets.push_back(b.get<std::vector<double>>());
  return t;
}

nlohmann::json feature_pipeline_to_json(const FittedFeaturePipeline& p) {
  nlohmann::json groups = nlohmann::json::array();
  for (FeatureGroup g : p.groups) groups.push_back(to_string(g));
  nlohmann::json j{{"groups", groups},
                   {"scaling", p.scaling},
                   {"language", to_string(p.language)},
                   {"keywords", p.keywords.keywords}};
  j["tfidf"] = p.tfidf ? tfidf_to_json(*p.tfidf) : nlohmann::json(nullptr);
  j["scaler"] = p.scaler ? scaler_to_json(*p.scaler) : nlohmann::json(nullptr);
  return j;
}

FittedFeaturePipeline feature_pipeline_from_json(const nlohmann::json& j) {
  FittedFeaturePipeline p;
  for (const auto& g : j.at("groups")) p.groups.push_back(parse_feature_group(g.get<std::string>()));
  p.scaling = j.at("scaling").get<bool>();
  p.language = parse_language(j.at("language").get<std::string>());
  p.keywords.language = p.language;
  p.keywords.keywords = j.at("keywords").get<std::vector<std::string>>();
  if (!j.at("tfidf").is_null()) p.tfidf = tfidf_from_json(j["tfidf"]);
  if (!j.at("scaler").is_null()) p.scaler = scaler_from_json(j["scaler"]);
  return p;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << j.dump();
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
}

}  // namespace

nlohmann::json model_to_json(const TraditionalModel& model) {
  nlohmann::json j{{"format", kModelFormat},
                   {"version", kModelVersion},
                   {"kind", "traditional"},
                   {"language", to_string(model.language)},
                   {"positive", to_string(model.positive)},
                   {"sampling", model.sampling},
                   {"seed", model.seed},
                   {"features", feature_pipeline_to_json(model.features)},
                   {"classifier", model.classifier.to_json()}};
  j["embedded_vectors"] =
      model.embedded_vectors ? embeddings_to_json(*model.embedded_vectors) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json model_to_json(const DeepModel& model) {
  return nlohmann::json{{"format", kModelFormat},
                        {"version", kModelVersion},
                        {"kind", "deep"},
                        {"language", to_string(model.language)},
                        {"positive", to_string(model.positive)},
                        {"sampling", model.sampling},
                        {"scaling", model.scaling},
                        {"seed", model.seed},
                        {"vocab", model.vocab.words},
                        {"cnn", model.cnn.to_json()}};
}

void save_model(const TraditionalModel& model, const std::string& path) {
  write_json_file(model_to_json(model), path);
}

void save_model(const DeepModel& model, const std::string& path) {
  write_json_file(model_to_json(model), path);
}

Language LoadedModel::language() const {
  return traditional ? traditional->language : deep->language;
}

LabelClass LoadedModel::positive() const {
  return traditional ? traditional->positive : deep->positive;
}

LoadedModel load_model(const std::string& path) {
  nlohmann::json j = read_json_file(path);
  if (!j.contains("format") || j["format"] != kModelFormat)
    throw InputError(path + ": not a model file");
  if (j.at("version").get<int>() != kModelVersion)
    throw InputError(path + ": unsupported model version");
  LoadedModel loaded;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "traditional") {
    TraditionalModel m;
    m.language = parse_language(j.at("language").get<std::string>());
    m.positive = parse_label(j.at("positive").get<std::string>());
    m.sampling = j.at("sampling").get<bool>();
    m.seed = j.at("seed").get<uint64_t>();
    m.features = feature_pipeline_from_json(j.at("features"));
    m.classifier = TrainedClassifier::from_json(j.at("classifier"));
    if (!j.at("embedded_vectors").is_null())
      m.embedded_vectors = embeddings_from_json(j["embedded_vectors"]);
    loaded.traditional = std::move(m);
  } else if (kind == "deep") {
    DeepModel m;
    m.language = parse_language(j.at("language").get<std::string>());
    m.positive = parse_label(j.at("positive").get<std::string>());
    m.sampling = j.at("sampling").get<bool>();
    m.scaling = j.at("scaling").get<bool>();
    m.seed = j.at("seed").get<uint64_t>();
    m.vocab = VocabIndex::from_words(j.at("vocab").get<std::vector<std::string>>());
    m.cnn = CnnModel::from_json(j.at("cnn"));
    if (m.cnn.vocab_fingerprint != m.vocab.fingerprint)
      throw InputError(path + ": vocabulary fingerprint mismatch");
    loaded.deep = std::move(m);
  } else {
    throw InputError(path + ": unknown model kind '" + kind + "'");
  }
  return loaded;
}

std::vector<double> predict_with_model(const LoadedModel& model,
                                       const std::vector<FeedbackDocument>& docs,
                                       const Resources& res) {
  if (model.traditional) return predict_traditional(*model.traditional, docs, res);
  return predict_deep(*model.deep, docs, res);
}

}  // namespace feedkit
