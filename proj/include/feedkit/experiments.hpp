#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feedkit/metrics.hpp"
#include "feedkit/pipeline.hpp"

namespace feedkit {

struct FeatureCombo {
  std::vector<FeatureGroup> groups;  // canonical order, no duplicates
  std::string name() const;          // groups joined with '+'
};

FeatureCombo make_combo(std::initializer_list<FeatureGroup> groups);

// The default list of 30 combinations: the 8 singletons, documented pairs and
// stacks including every winning preset combination, and the cumulative
// prefixes of the canonical group order.
std::vector<FeatureCombo> default_feature_combinations();

// Default per-algorithm grids; they cover every preset hyperparameter value.
std::vector<ClassifierConfig> default_algorithm_grid();

struct ExperimentGrid {
  std::vector<FeatureCombo> feature_combinations;
  std::vector<bool> scaling = {false, true};
  std::vector<bool> sampling = {false, true};
  std::vector<ClassifierConfig> algorithm_configs;
  TfidfOptions tfidf;

  size_t cell_count() const {
    return feature_combinations.size() * scaling.size() * sampling.size() *
           algorithm_configs.size();
  }
};

ExperimentGrid default_traditional_grid();

struct CvConfig {
  size_t folds = 5;
  bool stratified = false;
};

// One grid cell with its cross-validation outcome. Cells are ranked by mean
// f1; ties break on fewer feature groups, then the smaller model_size_key,
// then the lexicographically smaller cell id.
struct CellScore {
  std::string cell_id;
  size_t combo_index = 0;
  size_t algo_index = 0;
  size_t feature_group_count = 0;
  uint64_t model_size_key = 0;
  bool scaling = false;
  bool sampling = false;
  double mean_f1 = 0.0;
  std::vector<double> fold_f1;
};

struct AuditEntry {
  std::string cell_id;
  size_t fold = 0;
  std::string transformer;  // "sampler", "tfidf" or "scaler"
  bool subset_of_fold_train = false;
  bool balanced = true;  // sampler entries: both groups equal afterwards
};

size_t select_best_cell(const std::vector<CellScore>& table);

struct GridSearchResult {
  size_t best_index = 0;
  std::vector<CellScore> table;  // cell enumeration order
  std::vector<AuditEntry> audit;
  size_t cells_evaluated = 0;

  const CellScore& best() const { return table[best_index]; }
};

// Exhaustive evaluation of every cell with k-fold CV on the training set.
// Under-sampling, tf-idf and the scaler are fitted inside each fold's
// training part only; the audit records the fingerprint checks. Deterministic
// for any worker count: per-cell seeds derive from (seed, cell id).
GridSearchResult run_grid_search(const LabeledDataset& train, LabelClass positive,
                                 const ExperimentGrid& grid, const CvConfig& cv, uint64_t seed,
                                 const Resources& res, size_t jobs = 1);

struct CnnGrid {
  std::vector<size_t> number_filters = {16};
  std::vector<size_t> kernel_sizes = {3, 5};
  std::vector<size_t> dense_units = {16, 32};
  bool sampling = true;
  bool scaling = true;  // recorded; tokens are never scaled
  size_t input_length = 200;
  size_t epochs = 7;
  size_t batch_size = 32;
  double learning_rate = 1e-3;

  size_t cell_count() const {
    return number_filters.size() * kernel_sizes.size() * dense_units.size();
  }
};

struct CnnSearchResult {
  size_t best_index = 0;
  CnnConfig best_config;
  std::vector<CellScore> table;
  std::vector<AuditEntry> audit;
  size_t cells_evaluated = 0;
};

// Stratified k-fold (3 by default at call sites) over the CNN architecture
// grid; same exhaustiveness, tie-break and audit contracts as
// run_grid_search.
CnnSearchResult run_cnn_search(const LabeledDataset& train, LabelClass positive,
                               const CnnGrid& grid, const CvConfig& cv, uint64_t seed,
                               const Resources& res, size_t jobs = 1);

enum class Approach { Traditional, Deep };
const std::string& to_string(Approach a);
Approach parse_approach(const std::string& s);

struct BenchmarkResult {
  std::string dataset_id;
  LabelClass positive = LabelClass::ProblemReport;
  Approach approach = Approach::Traditional;
  MetricReport metrics;
  std::string winning_config;
  double wall_clock_seconds = 0.0;
  bool best_f1 = false;  // best f1 within its (dataset, class) pair
};

struct BenchmarkDataset {
  std::string id;
  LabeledDataset data;
};

struct BenchmarkConfig {
  std::vector<BenchmarkDataset> datasets;
  std::vector<LabelClass> classes = {LabelClass::ProblemReport, LabelClass::Inquiry,
                                     LabelClass::Irrelevant};
  std::vector<Approach> approaches = {Approach::Traditional, Approach::Deep};
  ExperimentGrid traditional_grid;
  CnnGrid cnn_grid;
  CvConfig traditional_cv{5, false};
  CvConfig cnn_cv{3, true};
  double split_ratio = 0.8;
  uint64_t seed = 42;
  size_t jobs = 1;
};

struct BenchmarkOutput {
  std::vector<BenchmarkResult> results;
  nlohmann::json score_tables;  // per (dataset, class, approach) CV tables
  // Serialized winning model per row, keyed "<dataset>.<class>.<approach>".
  std::vector<std::pair<std::string, nlohmann::json>> winning_models;
};

// For each dataset x class x approach: split, search on the training side,
// refit the winner on the full training set, evaluate once on the untouched
// test set.
BenchmarkOutput run_benchmark(const BenchmarkConfig& config, const Resources& res);

std::string results_csv(const std::vector<BenchmarkResult>& results);
void write_results(const BenchmarkOutput& output, const std::string& out_dir);

}  // namespace feedkit
