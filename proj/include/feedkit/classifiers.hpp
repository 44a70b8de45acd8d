#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "feedkit/corpus.hpp"
#include "feedkit/matrix.hpp"
#include "json.hpp"

namespace feedkit {

enum class Algorithm { NaiveBayes, DecisionTree, RandomForest, LinearSvm };
enum class SplitCriterion { Gini, Entropy };
enum class Splitter { Best, Random };
enum class MaxFeatures { Auto, Log2, None };  // sqrt(d) / log2(d) / all d

const std::string& to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& s);
const std::string& to_string(SplitCriterion c);
SplitCriterion parse_criterion(const std::string& s);
const std::string& to_string(Splitter s);
Splitter parse_splitter(const std::string& s);
const std::string& to_string(MaxFeatures m);
MaxFeatures parse_max_features(const std::string& s);

struct NbParams {
  double var_smoothing = 1e-9;  // times the largest per-feature variance
};

struct DtParams {
  SplitCriterion criterion = SplitCriterion::Gini;
  std::optional<size_t> max_depth;  // empty: unlimited
  size_t min_samples_leaf = 1;
  size_t min_samples_split = 2;
  Splitter splitter = Splitter::Best;
};

struct RfParams {
  size_t n_estimators = 100;
  MaxFeatures max_features = MaxFeatures::Auto;
  DtParams tree;        // per-tree defaults
  bool bootstrap = true;
};

struct SvmParams {
  double lambda = 1e-4;  // L2 regularization; learning rate is 1/(lambda*t)
  size_t epochs = 10;
};

struct ClassifierConfig {
  Algorithm algorithm = Algorithm::NaiveBayes;
  NbParams nb;
  DtParams dt;
  RfParams rf;
  SvmParams svm;

  // Canonical parameter string, used in grid-cell ids and tie-breaking.
  std::string params_id() const;
  // Ordinal used by the "smaller model" tie-break in grid search.
  uint64_t model_size_key() const;

  nlohmann::json to_json() const;
  static ClassifierConfig from_json(const nlohmann::json& j);
};

// Binary decision tree node; leaves keep the training positive fraction.
struct TreeNode {
  int32_t feature = -1;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  double positive_fraction = 0.0;
  bool is_leaf() const { return feature < 0; }
};

struct NbState {
  double log_prior[2] = {0.0, 0.0};
  std::vector<double> mean[2];
  std::vector<double> var[2];  // smoothed
};

struct DtState {
  std::vector<TreeNode> nodes;
};

struct RfState {
  std::vector<DtState> trees;
};

struct SvmState {
  std::vector<double> weights;
  double bias = 0.0;
};

// Immutable after fit. predict(x) thresholds predict_score(x) at 0.5, where
// the score is the class probability (NB), leaf positive fraction (DT), tree
// vote fraction (RF) or logistic-squashed margin (SVM).
struct TrainedClassifier {
  ClassifierConfig config;
  size_t feature_dimension = 0;
  uint64_t seed = 0;
  std::optional<LabelClass> positive_class;
  std::variant<NbState, DtState, RfState, SvmState> state;

  nlohmann::json to_json() const;
  static TrainedClassifier from_json(const nlohmann::json& j);
};

// Requires both classes in y and a NaN-free matrix. Deterministic per seed.
TrainedClassifier fit_classifier(const ClassifierConfig& config, const Matrix& x,
                                 const std::vector<int>& y, uint64_t seed);

double predict_score(const TrainedClassifier& model, std::span<const double> x);
int predict(const TrainedClassifier& model, std::span<const double> x);
std::vector<double> predict_scores(const TrainedClassifier& model, const Matrix& x);

}  // namespace feedkit
