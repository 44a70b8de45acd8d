#include "feedkit/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "feedkit/hash.hpp"

namespace feedkit {

std::string FeatureCombo::name() const {
  std::string s;
  for (size_t i = 0; i < groups.size(); ++i) {
    if (i > 0) s += "+";
    s += to_string(groups[i]);
  }
  return s;
}

FeatureCombo make_combo(std::initializer_list<FeatureGroup> groups) {
  FeatureCombo combo;
  combo.groups.assign(groups.begin(), groups.end());
  std::sort(combo.groups.begin(), combo.groups.end());
  if (std::adjacent_find(combo.groups.begin(), combo.groups.end()) != combo.groups.end())
    throw InputError("duplicate feature group in combination");
  return combo;
}

std::vector<FeatureCombo> default_feature_combinations() {
  using G = FeatureGroup;
  std::vector<FeatureCombo> combos;
  // The 8 singletons.
  for (size_t i = 0; i < 8; ++i) combos.push_back(make_combo({static_cast<G>(i)}));
  // Documented pairs and stacks, including every preset-winning combination.
  combos.push_back(make_combo({G::Sentiment, G::FastText}));
  combos.push_back(make_combo({G::NWords, G::Keywords, G::Pos, G::Tfidf}));
  combos.push_back(make_combo({G::Sentiment, G::Tfidf}));
  combos.push_back(make_combo({G::Tfidf, G::Keywords}));
  combos.push_back(make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords, G::Tfidf}));
  combos.push_back(make_combo(
      {G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords, G::Tfidf, G::FastText}));
  combos.push_back(
      make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords, G::FastText}));
  combos.push_back(
      make_combo({G::Sentiment, G::NWords, G::NStopwords, G::Tense, G::Pos, G::Tfidf}));
  combos.push_back(make_combo({G::NWords, G::NStopwords, G::Tense, G::Pos, G::Keywords}));
  combos.push_back(make_combo(
      {G::Sentiment, G::NWords, G::NStopwords, G::Tense, G::Pos, G::Tfidf, G::Keywords}));
  // Cumulative prefixes of the canonical order, lengths 2..6 and the full
  // stack (the length-7 prefix already appears among the stacks above).
  for (size_t len : {2, 3, 4, 5, 6, 8}) {
    FeatureCombo combo;
    for (size_t i = 0; i < len; ++i) combo.groups.push_back(static_cast<G>(i));
    combos.push_back(combo);
  }
  // Small mixed pairs and triples.
  combos.push_back(make_combo({G::NWords, G::NStopwords}));
  combos.push_back(make_combo({G::Sentiment, G::Keywords}));
  combos.push_back(make_combo({G::Tfidf, G::FastText}));
  combos.push_back(make_combo({G::Tense, G::Pos, G::Keywords}));
  combos.push_back(make_combo({G::Sentiment, G::NWords, G::Keywords}));
  combos.push_back(make_combo({G::Keywords, G::Tfidf, G::FastText}));
  return combos;
}

std::vector<ClassifierConfig> default_algorithm_grid() {
  std::vector<ClassifierConfig> configs;
  {
    ClassifierConfig c;
    c.algorithm = Algorithm::NaiveBayes;
    configs.push_back(c);
  }
  for (SplitCriterion crit : {SplitCriterion::Gini, SplitCriterion::Entropy})
    for (std::optional<size_t> depth : {std::optional<size_t>(1), std::optional<size_t>(8),
                                        std::optional<size_t>()})
      for (size_t leaf : {1, 2, 8, 10})
        for (size_t split : {2, 4, 6})
          for (Splitter sp : {Splitter::Best, Splitter::Random}) {
            ClassifierConfig c;
            c.algorithm = Algorithm::DecisionTree;
            c.dt = DtParams{crit, depth, leaf, split, sp};
            configs.push_back(c);
          }
  for (size_t trees : {500, 1000})
    for (MaxFeatures mf : {MaxFeatures::Auto, MaxFeatures::Log2, MaxFeatures::None}) {
      ClassifierConfig c;
      c.algorithm = Algorithm::RandomForest;
      c.rf.n_estimators = trees;
      c.rf.max_features = mf;
      configs.push_back(c);
    }
  {
    ClassifierConfig c;
    c.algorithm = Algorithm::LinearSvm;
    configs.push_back(c);
  }
  return configs;
}

ExperimentGrid default_traditional_grid() {
  ExperimentGrid grid;
  grid.feature_combinations = default_feature_combinations();
  grid.algorithm_configs = default_algorithm_grid();
  return grid;
}

namespace {

// Validation row indices per fold; every fold's training part must contain
// both classes.
std::vector<std::vector<size_t>> make_folds(const std::vector<int>& y, size_t folds,
                                            bool stratified, uint64_t seed) {
  size_t n = y.size();
  if (folds < 2) throw InputError("cross-validation needs at least 2 folds");
  if (n < folds) throw InputError("not enough examples for " + std::to_string(folds) + " folds");
  std::vector<std::vector<size_t>> fold_rows(folds);
  if (stratified) {
    for (int cls : {0, 1}) {
      std::vector<size_t> members;
      for (size_t i = 0; i < n; ++i)
        if (y[i] == cls) members.push_back(i);
      Rng rng(derive_seed(seed, "folds/class" + std::to_string(cls)));
      rng.shuffle(members);
      for (size_t m = 0; m < members.size(); ++m) fold_rows[m % folds].push_back(members[m]);
    }
    for (auto& rows : fold_rows) std::sort(rows.begin(), rows.end());
  } else {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, "folds"));
    rng.shuffle(order);
    size_t base = n / folds, extra = n % folds, pos = 0;
    for (size_t k = 0; k < folds; ++k) {
      size_t len = base + (k < extra ? 1 : 0);
      fold_rows[k].assign(order.begin() + pos, order.begin() + pos + len);
      std::sort(fold_rows[k].begin(), fold_rows[k].end());
      pos += len;
    }
  }
  for (size_t k = 0; k < folds; ++k) {
    std::set<size_t> val(fold_rows[k].begin(), fold_rows[k].end());
    bool has_pos = false, has_neg = false;
    for (size_t i = 0; i < n; ++i) {
      if (val.count(i)) continue;
      (y[i] == 1 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg)
      throw InputError("fold " + std::to_string(k) +
                       " training part has a single class; use stratified folds or a different seed");
  }
  return fold_rows;
}

std::vector<size_t> fold_train_rows(const std::vector<std::vector<size_t>>& folds, size_t k,
                                    size_t n) {
  std::vector<bool> in_val(n, false);
  for (size_t i : folds[k]) in_val[i] = true;
  std::vector<size_t> rows;
  rows.reserve(n - folds[k].size());
  for (size_t i = 0; i < n; ++i)
    if (!in_val[i]) rows.push_back(i);
  return rows;
}

bool is_sorted_subset(const std::vector<std::string>& sorted_subset,
                      std::vector<std::string> superset) {
  std::sort(superset.begin(), superset.end());
  return std::includes(superset.begin(), superset.end(), sorted_subset.begin(),
                       sorted_subset.end());
}

double fold_f1(const std::vector<int>& y_val, const std::vector<double>& scores) {
  std::vector<int> preds(scores.size());
  for (size_t i = 0; i < scores.size(); ++i) preds[i] = scores[i] >= 0.5 ? 1 : 0;
  return precision_recall_f1(confusion(y_val, preds)).f1;
}

void parallel_for(size_t count, size_t jobs, const std::function<void(size_t)>& fn) {
  jobs = std::min(std::max<size_t>(jobs, 1), count);
  if (jobs <= 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      while (true) {
        size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

struct TradCell {
  size_t combo_index = 0;
  size_t algo_index = 0;
  bool scaling = false;
  bool sampling = false;
  std::string id;
};

std::vector<TradCell> enumerate_cells(const ExperimentGrid& grid) {
  std::vector<TradCell> cells;
  cells.reserve(grid.cell_count());
  for (size_t ci = 0; ci < grid.feature_combinations.size(); ++ci)
    for (bool scaling : grid.scaling)
      for (bool sampling : grid.sampling)
        for (size_t ai = 0; ai < grid.algorithm_configs.size(); ++ai) {
          TradCell cell{ci, ai, scaling, sampling, ""};
          const auto& clf = grid.algorithm_configs[ai];
          cell.id = "combo=" + grid.feature_combinations[ci].name() +
                    "|scaling=" + (scaling ? "on" : "off") +
                    "|sampling=" + (sampling ? "on" : "off") + "|algo=" +
                    to_string(clf.algorithm) + "(" + clf.params_id() + ")";
          cells.push_back(std::move(cell));
        }
  return cells;
}

}  // namespace

size_t select_best_cell(const std::vector<CellScore>& table) {
  if (table.empty()) throw InputError("empty score table");
  size_t best = 0;
  for (size_t i = 1; i < table.size(); ++i) {
    const auto& a = table[i];
    const auto& b = table[best];
    auto key = [](const CellScore& c) {
      return std::make_tuple(-c.mean_f1, c.feature_group_count, c.model_size_key, c.cell_id);
    };
    if (key(a) < key(b)) best = i;
  }
  return best;
}

GridSearchResult run_grid_search(const LabeledDataset& train, LabelClass positive,
                                 const ExperimentGrid& grid, const CvConfig& cv, uint64_t seed,
                                 const Resources& res, size_t jobs) {
  if (grid.feature_combinations.empty() || grid.algorithm_configs.empty() ||
      grid.scaling.empty() || grid.sampling.empty())
    throw InputError("grid search requires at least one value per dimension");
  auto pdocs = preprocess(train, res);
  auto y = binary_labels(pdocs, positive);
  if (std::count(y.begin(), y.end(), 1) == 0 ||
      std::count(y.begin(), y.end(), 0) == 0)
    throw InputError("training set does not contain both classes for '" + to_string(positive) +
                     "'");
  auto folds = make_folds(y, cv.folds, cv.stratified, derive_seed(seed, "cv"));
  auto cells = enumerate_cells(grid);

  GridSearchResult result;
  result.table.resize(cells.size());
  std::vector<std::vector<AuditEntry>> audits(cells.size());

  parallel_for(cells.size(), jobs, [&](size_t cell_index) {
    const TradCell& cell = cells[cell_index];
    const FeatureCombo& combo = grid.feature_combinations[cell.combo_index];
    const ClassifierConfig& clf = grid.algorithm_configs[cell.algo_index];
    uint64_t cell_seed = derive_seed(seed, cell.id);

    CellScore score;
    score.cell_id = cell.id;
    score.combo_index = cell.combo_index;
    score.algo_index = cell.algo_index;
    score.feature_group_count = combo.groups.size();
    score.model_size_key = clf.model_size_key();
    score.scaling = cell.scaling;
    score.sampling = cell.sampling;

    for (size_t k = 0; k < folds.size(); ++k) {
      auto train_rows = fold_train_rows(folds, k, pdocs.size());
      std::vector<size_t> rows_used = train_rows;
      if (cell.sampling) {
        Rng rng(derive_seed(cell_seed, "fold" + std::to_string(k) + "/sample"));
        rows_used = undersample_indices(y, train_rows, rng);
        AuditEntry audit{cell.id, k, "sampler", true, true};
        std::set<size_t> train_set(train_rows.begin(), train_rows.end());
        size_t pos = 0;
        for (size_t r : rows_used) {
          if (!train_set.count(r)) audit.subset_of_fold_train = false;
          pos += static_cast<size_t>(y[r]);
        }
        audit.balanced = pos * 2 == rows_used.size();
        audits[cell_index].push_back(audit);
      }
      std::vector<const PipelineDoc*> train_ptrs;
      std::vector<std::string> train_ids;
      for (size_t r : train_rows) train_ids.push_back(pdocs[r].doc->id);
      for (size_t r : rows_used) train_ptrs.push_back(&pdocs[r]);
      auto pipeline = fit_feature_pipeline(combo.groups, cell.scaling, train_ptrs, res, grid.tfidf);
      if (pipeline.tfidf)
        audits[cell_index].push_back({cell.id, k, "tfidf",
                                      is_sorted_subset(pipeline.tfidf->fitted_on, train_ids),
                                      true});
      if (pipeline.scaler)
        audits[cell_index].push_back({cell.id, k, "scaler",
                                      is_sorted_subset(pipeline.scaler->fitted_on, train_ids),
                                      true});
      Matrix x_train = transform_features(pipeline, train_ptrs, res);
      std::vector<int> y_train;
      for (size_t r : rows_used) y_train.push_back(y[r]);
      auto model = fit_classifier(clf, x_train, y_train,
                                  derive_seed(cell_seed, "fold" + std::to_string(k) + "/fit"));
      std::vector<const PipelineDoc*> val_ptrs;
      std::vector<int> y_val;
      for (size_t r : folds[k]) {
        val_ptrs.push_back(&pdocs[r]);
        y_val.push_back(y[r]);
      }
      Matrix x_val = transform_features(pipeline, val_ptrs, res);
      score.fold_f1.push_back(fold_f1(y_val, predict_scores(model, x_val)));
    }
    score.mean_f1 = std::accumulate(score.fold_f1.begin(), score.fold_f1.end(), 0.0) /
                    static_cast<double>(score.fold_f1.size());
    result.table[cell_index] = std::move(score);
  });

  for (auto& a : audits)
    result.audit.insert(result.audit.end(), a.begin(), a.end());
  result.cells_evaluated = cells.size();
  result.best_index = select_best_cell(result.table);
  return result;
}

CnnSearchResult run_cnn_search(const LabeledDataset& train, LabelClass positive,
                               const CnnGrid& grid, const CvConfig& cv, uint64_t seed,
                               const Resources& res, size_t jobs) {
  if (grid.number_filters.empty() || grid.kernel_sizes.empty() || grid.dense_units.empty())
    throw InputError("CNN grid requires at least one value per dimension");
  auto pdocs = preprocess(train, res);
  auto y = binary_labels(pdocs, positive);
  Language lang = dataset_language(pdocs);
  const EmbeddingTable& table = res.embeddings_for(lang);
  VocabIndex vocab = build_vocab_index(table);
  std::vector<std::vector<uint32_t>> encoded;
  encoded.reserve(pdocs.size());
  for (const auto& d : pdocs) encoded.push_back(encode_tokens(d.text, vocab, grid.input_length));

  auto folds = make_folds(y, cv.folds, cv.stratified, derive_seed(seed, "cv"));

  struct CnnCell {
    size_t filters, kernel, dense;
    std::string id;
  };
  std::vector<CnnCell> cells;
  for (size_t f : grid.number_filters)
    for (size_t k : grid.kernel_sizes)
      for (size_t u : grid.dense_units) {
        CnnCell cell{f, k, u, ""};
        cell.id = "cnn(number_filters=" + std::to_string(f) + ",kernel_size=" + std::to_string(k) +
                  ",dense_units=" + std::to_string(u) + ")|sampling=" +
                  (grid.sampling ? "on" : "off") + "|scaling=" + (grid.scaling ? "on" : "off");
        cells.push_back(std::move(cell));
      }

  CnnSearchResult result;
  result.table.resize(cells.size());
  std::vector<std::vector<AuditEntry>> audits(cells.size());

  parallel_for(cells.size(), jobs, [&](size_t cell_index) {
    const CnnCell& cell = cells[cell_index];
    uint64_t cell_seed = derive_seed(seed, cell.id);
    CnnConfig cfg;
    cfg.input_length = grid.input_length;
    cfg.embedding_dim = table.dimension;
    cfg.number_filters = cell.filters;
    cfg.kernel_size = cell.kernel;
    cfg.dense_units = cell.dense;
    cfg.epochs = grid.epochs;
    cfg.batch_size = grid.batch_size;
    cfg.learning_rate = grid.learning_rate;

    CellScore score;
    score.cell_id = cell.id;
    score.combo_index = cell_index;
    score.algo_index = cell_index;
    score.feature_group_count = 0;
    score.model_size_key = count_trainable_params(cfg);
    score.scaling = grid.scaling;
    score.sampling = grid.sampling;

    for (size_t k = 0; k < folds.size(); ++k) {
      auto train_rows = fold_train_rows(folds, k, pdocs.size());
      std::vector<size_t> rows_used = train_rows;
      if (grid.sampling) {
        Rng rng(derive_seed(cell_seed, "fold" + std::to_string(k) + "/sample"));
        rows_used = undersample_indices(y, train_rows, rng);
        AuditEntry audit{cell.id, k, "sampler", true, true};
        std::set<size_t> train_set(train_rows.begin(), train_rows.end());
        size_t pos = 0;
        for (size_t r : rows_used) {
          if (!train_set.count(r)) audit.subset_of_fold_train = false;
          pos += static_cast<size_t>(y[r]);
        }
        audit.balanced = pos * 2 == rows_used.size();
        audits[cell_index].push_back(audit);
      }
      std::vector<std::vector<uint32_t>> x_train;
      std::vector<int> y_train;
      for (size_t r : rows_used) {
        x_train.push_back(encoded[r]);
        y_train.push_back(y[r]);
      }
      CnnModel model = init_cnn(cfg, vocab, table,
                                derive_seed(cell_seed, "fold" + std::to_string(k) + "/init"));
      cnn_train(model, x_train, y_train,
                derive_seed(cell_seed, "fold" + std::to_string(k) + "/fit"));
      std::vector<std::vector<uint32_t>> x_val;
      std::vector<int> y_val;
      for (size_t r : folds[k]) {
        x_val.push_back(encoded[r]);
        y_val.push_back(y[r]);
      }
      score.fold_f1.push_back(fold_f1(y_val, cnn_predict_proba(model, x_val)));
    }
    score.mean_f1 = std::accumulate(score.fold_f1.begin(), score.fold_f1.end(), 0.0) /
                    static_cast<double>(score.fold_f1.size());
    result.table[cell_index] = std::move(score);
  });

  for (auto& a : audits)
    result.audit.insert(result.audit.end(), a.begin(), a.end());
  result.cells_evaluated = cells.size();
  result.best_index = select_best_cell(result.table);
  const CnnCell& best = cells[result.best_index];
  result.best_config.input_length = grid.input_length;
  result.best_config.embedding_dim = table.dimension;
  result.best_config.number_filters = best.filters;
  result.best_config.kernel_size = best.kernel;
  result.best_config.dense_units = best.dense;
  result.best_config.epochs = grid.epochs;
  result.best_config.batch_size = grid.batch_size;
  result.best_config.learning_rate = grid.learning_rate;
  return result;
}

namespace {
const std::string kApproachNames[] = {"traditional", "deep"};
}

const std::string& to_string(Approach a) { return kApproachNames[static_cast<size_t>(a)]; }

Approach parse_approach(const std::string& s) {
  for (size_t i = 0; i < 2; ++i)
    if (kApproachNames[i] == s) return static_cast<Approach>(i);
  throw InputError("unknown approach '" + s + "' (expected traditional or deep)");
}

BenchmarkOutput run_benchmark(const BenchmarkConfig& config, const Resources& res) {
  if (config.datasets.empty()) throw InputError("benchmark needs at least one dataset");
  if (config.classes.empty()) throw InputError("benchmark needs at least one class");
  if (config.approaches.empty()) throw InputError("benchmark needs at least one approach");

  BenchmarkOutput output;
  output.score_tables = nlohmann::json::object();

  for (const auto& dataset : config.datasets) {
    DataSplit split;
    try {
      split = stratified_split(dataset.data, config.split_ratio,
                               derive_seed(config.seed, "split/" + dataset.id));
    } catch (const Error& e) {
      throw InputError("dataset '" + dataset.id + "': " + e.what());
    }
    for (LabelClass positive : config.classes) {
      for (Approach approach : config.approaches) {
        std::string context = dataset.id + "/" + to_string(positive) + "/" + to_string(approach);
        auto started = std::chrono::steady_clock::now();
        BenchmarkResult row;
        row.dataset_id = dataset.id;
        row.positive = positive;
        row.approach = approach;
        try {
          std::vector<int> y_test;
          for (const auto& d : split.test.documents)
            y_test.push_back(*d.label == positive ? 1 : 0);
          uint64_t task_seed = derive_seed(config.seed, context);
          if (approach == Approach::Traditional) {
            auto search = run_grid_search(split.train, positive, config.traditional_grid,
                                          config.traditional_cv, task_seed, res, config.jobs);
            const CellScore& best = search.best();
            const FeatureCombo& combo =
                config.traditional_grid.feature_combinations[best.combo_index];
            const ClassifierConfig& clf =
                config.traditional_grid.algorithm_configs[best.algo_index];
            auto model = fit_traditional_model(split.train, positive, combo.groups, clf,
                                               best.sampling, best.scaling, res,
                                               config.traditional_grid.tfidf,
                                               derive_seed(task_seed, "final"));
            auto scores = predict_traditional(model, split.test.documents, res);
            row.metrics = evaluate(y_test, scores);
            row.winning_config = best.cell_id;
            output.winning_models.emplace_back(
                dataset.id + "." + to_string(positive) + "." + to_string(approach),
                model_to_json(model));
            nlohmann::json cells = nlohmann::json::array();
            for (const auto& c : search.table)
              cells.push_back({{"cell_id", c.cell_id}, {"mean_f1", c.mean_f1},
                               {"fold_f1", c.fold_f1}});
            output.score_tables[context] = std::move(cells);
          } else {
            auto search = run_cnn_search(split.train, positive, config.cnn_grid, config.cnn_cv,
                                         task_seed, res, config.jobs);
            auto model = fit_deep_model(split.train, positive, search.best_config,
                                        config.cnn_grid.sampling, res,
                                        derive_seed(task_seed, "final"));
            model.scaling = config.cnn_grid.scaling;
            auto scores = predict_deep(model, split.test.documents, res);
            row.metrics = evaluate(y_test, scores);
            row.winning_config = search.table[search.best_index].cell_id;
            output.winning_models.emplace_back(
                dataset.id + "." + to_string(positive) + "." + to_string(approach),
                model_to_json(model));
            nlohmann::json cells = nlohmann::json::array();
            for (const auto& c : search.table)
              cells.push_back({{"cell_id", c.cell_id}, {"mean_f1", c.mean_f1},
                               {"fold_f1", c.fold_f1}});
            output.score_tables[context] = std::move(cells);
          }
        } catch (const Error& e) {
          throw InputError("benchmark failed for " + context + ": " + e.what());
        }
        row.wall_clock_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        output.results.push_back(std::move(row));
      }
    }
  }

  // Flag the best f1 within each (dataset, class) pair.
  for (auto& row : output.results) {
    row.best_f1 = true;
    for (const auto& other : output.results) {
      if (other.dataset_id == row.dataset_id && other.positive == row.positive &&
          other.metrics.f1 > row.metrics.f1)
        row.best_f1 = false;
    }
  }
  return output;
}

std::string results_csv(const std::vector<BenchmarkResult>& results) {
  std::ostringstream out;
  out << "dataset,class,approach,precision,recall,f1,roc_auc,pr_auc,best,config\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
  };
  for (const auto& r : results) {
    out << r.dataset_id << "," << to_string(r.positive) << "," << to_string(r.approach) << ","
        << num(r.metrics.precision) << "," << num(r.metrics.recall) << "," << num(r.metrics.f1)
        << "," << num(r.metrics.roc_auc) << "," << num(r.metrics.pr_auc) << ","
        << (r.best_f1 ? "1" : "0") << ",\"" << r.winning_config << "\"\n";
  }
  return out.str();
}

void write_results(const BenchmarkOutput& output, const std::string& out_dir) {
  {
    std::ofstream csv(out_dir + "/results.csv", std::ios::binary);
    if (!csv) throw InputError("cannot write " + out_dir + "/results.csv");
    csv << results_csv(output.results);
  }
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : output.results) {
    nlohmann::json row = r.metrics.to_json();
    row["dataset"] = r.dataset_id;
    row["class"] = to_string(r.positive);
    row["approach"] = to_string(r.approach);
    row["winning_config"] = r.winning_config;
    row["wall_clock_seconds"] = r.wall_clock_seconds;
    row["best_f1"] = r.best_f1;
    rows.push_back(std::move(row));
  }
  nlohmann::json j{{"results", rows}, {"score_tables", output.score_tables}};
  std::ofstream js(out_dir + "/results.json", std::ios::binary);
  if (!js) throw InputError("cannot write " + out_dir + "/results.json");
  js << j.dump(2);
  js.close();
  if (!output.winning_models.empty()) {
    std::filesystem::create_directories(out_dir + "/models");
    for (const auto& [name, model] : output.winning_models) {
      std::ofstream mf(out_dir + "/models/" + name + ".model.json", std::ios::binary);
      if (!mf) throw InputError("cannot write model file for " + name);
      mf << model.dump();
    }
  }
}

}  // namespace feedkit
