#include "feedkit/runconfig.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace feedkit {

namespace {

namespace fs = std::filesystem;

nlohmann::json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
}

std::string resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path.string() : (base / path).string();
}

template <typename T>
std::vector<T> values_of(const nlohmann::json& spec, const char* key, std::vector<T> defaults) {
  if (!spec.contains(key)) return defaults;
  std::vector<T> out;
  for (const auto& v : spec.at(key)) out.push_back(v.template get<T>());
  if (out.empty()) throw InputError(std::string("config key '") + key + "' must not be empty");
  return out;
}

}  // namespace

std::vector<ClassifierConfig> expand_algorithm_grid(const nlohmann::json& spec) {
  Algorithm algo = parse_algorithm(spec.at("algorithm").get<std::string>());
  std::vector<ClassifierConfig> out;
  switch (algo) {
    case Algorithm::NaiveBayes: {
      ClassifierConfig c;
      c.algorithm = algo;
      out.push_back(c);
      break;
    }
    case Algorithm::DecisionTree: {
      auto criteria = values_of<std::string>(spec, "criterion", {"gini"});
      std::vector<std::optional<size_t>> depths;
      if (spec.contains("max_depth")) {
        for (const auto& v : spec["max_depth"])
          depths.push_back(v.is_null() ? std::optional<size_t>() : v.get<size_t>());
      } else {
        depths = {std::nullopt};
      }
      auto leaves = values_of<size_t>(spec, "min_samples_leaf", {1});
      auto splits = values_of<size_t>(spec, "min_samples_split", {2});
      auto splitters = values_of<std::string>(spec, "splitter", {"best"});
      for (const auto& crit : criteria)
        for (const auto& depth : depths)
          for (size_t leaf : leaves)
            for (size_t split : splits)
              for (const auto& sp : splitters) {
                ClassifierConfig c;
                c.algorithm = algo;
                c.dt = DtParams{parse_criterion(crit), depth, leaf, split, parse_splitter(sp)};
                out.push_back(c);
              }
      break;
    }
    case Algorithm::RandomForest: {
      auto estimators = values_of<size_t>(spec, "n_estimators", {100});
      auto max_features = values_of<std::string>(spec, "max_features", {"auto"});
      for (size_t n : estimators)
        for (const auto& mf : max_features) {
          ClassifierConfig c;
          c.algorithm = algo;
          c.rf.n_estimators = n;
          c.rf.max_features = parse_max_features(mf);
          out.push_back(c);
        }
      break;
    }
    case Algorithm::LinearSvm: {
      auto lambdas = values_of<double>(spec, "lambda", {1e-4});
      auto epochs = values_of<size_t>(spec, "epochs", {10});
      for (double l : lambdas)
        for (size_t e : epochs) {
          ClassifierConfig c;
          c.algorithm = algo;
          c.svm.lambda = l;
          c.svm.epochs = e;
          out.push_back(c);
        }
      break;
    }
  }
  return out;
}

RunConfigFile parse_benchmark_config(const std::string& config_path) {
  nlohmann::json j = load_json(config_path);
  fs::path base = fs::path(config_path).parent_path();
  RunConfigFile cfg;

  if (!j.contains("datasets") || !j["datasets"].is_array() || j["datasets"].empty())
    throw InputError(config_path + ": config key 'datasets' must be a non-empty array");
  for (const auto& d : j["datasets"]) {
    BenchmarkDataset ds;
    ds.id = d.at("id").get<std::string>();
    std::string path = resolve(base, d.at("path").get<std::string>());
    DatasetFormat format = DatasetFormat::Jsonl;
    if (d.contains("format")) {
      std::string f = d["format"].get<std::string>();
      if (f == "jsonl")
        format = DatasetFormat::Jsonl;
      else if (f == "csv")
        format = DatasetFormat::Csv;
      else
        throw InputError(config_path + ": unknown dataset format '" + f + "'");
    }
    ds.data = load_dataset(path, format);
    cfg.dataset_paths.push_back(path);
    cfg.benchmark.datasets.push_back(std::move(ds));
  }

  if (j.contains("classes")) {
    cfg.benchmark.classes.clear();
    for (const auto& c : j["classes"]) cfg.benchmark.classes.push_back(parse_label(c.get<std::string>()));
    if (cfg.benchmark.classes.empty())
      throw InputError(config_path + ": config key 'classes' must not be empty");
  }
  if (j.contains("approaches")) {
    cfg.benchmark.approaches.clear();
    for (const auto& a : j["approaches"])
      cfg.benchmark.approaches.push_back(parse_approach(a.get<std::string>()));
    if (cfg.benchmark.approaches.empty())
      throw InputError(config_path + ": config key 'approaches' must not be empty");
  }
  if (j.contains("split")) {
    if (j["split"].contains("ratio")) cfg.benchmark.split_ratio = j["split"]["ratio"].get<double>();
    if (!(cfg.benchmark.split_ratio > 0.0 && cfg.benchmark.split_ratio < 1.0))
      throw InputError(config_path + ": config key 'split.ratio' must lie in (0,1)");
  }
  if (j.contains("data_dir")) cfg.data_dir = resolve(base, j["data_dir"].get<std::string>());
  if (j.contains("embeddings"))
    for (const auto& [lang, path] : j["embeddings"].items())
      cfg.embedding_paths[parse_language(lang)] = resolve(base, path.get<std::string>());
  if (j.contains("embedding_dim")) cfg.embedding_dim = j["embedding_dim"].get<size_t>();
  if (j.contains("tfidf")) {
    if (j["tfidf"].contains("min_df"))
      cfg.benchmark.traditional_grid.tfidf.min_df = j["tfidf"]["min_df"].get<size_t>();
    if (j["tfidf"].contains("max_df"))
      cfg.benchmark.traditional_grid.tfidf.max_df = j["tfidf"]["max_df"].get<double>();
  }

  auto& grid = cfg.benchmark.traditional_grid;
  if (j.contains("traditional")) {
    const auto& t = j["traditional"];
    if (!t.contains("feature_combinations") || t["feature_combinations"] == "default") {
      grid.feature_combinations = default_feature_combinations();
    } else {
      for (const auto& combo : t["feature_combinations"]) {
        FeatureCombo fc;
        for (const auto& g : combo) fc.groups.push_back(parse_feature_group(g.get<std::string>()));
        std::sort(fc.groups.begin(), fc.groups.end());
        if (fc.groups.empty())
          throw InputError(config_path + ": empty feature combination in config");
        grid.feature_combinations.push_back(std::move(fc));
      }
    }
    if (t.contains("scaling")) grid.scaling = values_of<bool>(t, "scaling", {false, true});
    if (t.contains("sampling")) grid.sampling = values_of<bool>(t, "sampling", {false, true});
    if (!t.contains("algorithms") || t["algorithms"] == "default") {
      grid.algorithm_configs = default_algorithm_grid();
    } else {
      for (const auto& spec : t["algorithms"]) {
        auto expanded = expand_algorithm_grid(spec);
        grid.algorithm_configs.insert(grid.algorithm_configs.end(), expanded.begin(),
                                      expanded.end());
      }
    }
  } else {
    grid = default_traditional_grid();
  }

  if (j.contains("cnn")) {
    const auto& c = j["cnn"];
    auto& cnn = cfg.benchmark.cnn_grid;
    if (c.contains("number_filters")) cnn.number_filters = values_of<size_t>(c, "number_filters", {16});
    if (c.contains("kernel_sizes")) cnn.kernel_sizes = values_of<size_t>(c, "kernel_sizes", {3, 5});
    if (c.contains("dense_units")) cnn.dense_units = values_of<size_t>(c, "dense_units", {16, 32});
    if (c.contains("sampling")) cnn.sampling = c["sampling"].get<bool>();
    if (c.contains("scaling")) cnn.scaling = c["scaling"].get<bool>();
    if (c.contains("input_length")) cnn.input_length = c["input_length"].get<size_t>();
    if (c.contains("epochs")) cnn.epochs = c["epochs"].get<size_t>();
    if (c.contains("batch_size")) cnn.batch_size = c["batch_size"].get<size_t>();
    if (c.contains("learning_rate")) cnn.learning_rate = c["learning_rate"].get<double>();
  }
  if (j.contains("cv")) {
    if (j["cv"].contains("traditional_folds"))
      cfg.benchmark.traditional_cv.folds = j["cv"]["traditional_folds"].get<size_t>();
    if (j["cv"].contains("cnn_folds")) cfg.benchmark.cnn_cv.folds = j["cv"]["cnn_folds"].get<size_t>();
    if (j["cv"].contains("stratified"))
      cfg.benchmark.traditional_cv.stratified = j["cv"]["stratified"].get<bool>();
  }
  return cfg;
}

}  // namespace feedkit
