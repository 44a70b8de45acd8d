#include "feedkit/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "feedkit/hash.hpp"
#include "feedkit/rng.hpp"

namespace feedkit {

namespace {

const std::string kAlgoNames[] = {"naive_bayes", "decision_tree", "random_forest", "linear_svm"};
const std::string kCritNames[] = {"gini", "entropy"};
const std::string kSplitterNames[] = {"best", "random"};
const std::string kMaxFeatNames[] = {"auto", "log2", "none"};

}  // namespace

const std::string& to_string(Algorithm a) { return kAlgoNames[static_cast<size_t>(a)]; }
Algorithm parse_algorithm(const std::string& s) {
  for (size_t i = 0; i < 4; ++i)
    if (kAlgoNames[i] == s) return static_cast<Algorithm>(i);
  throw InputError("unknown algorithm '" + s + "'");
}
const std::string& to_string(SplitCriterion c) { return kCritNames[static_cast<size_t>(c)]; }
SplitCriterion parse_criterion(const std::string& s) {
  for (size_t i = 0; i < 2; ++i)
    if (kCritNames[i] == s) return static_cast<SplitCriterion>(i);
  throw InputError("unknown criterion '" + s + "'");
}
const std::string& to_string(Splitter sp) { return kSplitterNames[static_cast<size_t>(sp)]; }
Splitter parse_splitter(const std::string& s) {
  for (size_t i = 0; i < 2; ++i)
    if (kSplitterNames[i] == s) return static_cast<Splitter>(i);
  throw InputError("unknown splitter '" + s + "'");
}
const std::string& to_string(MaxFeatures m) { return kMaxFeatNames[static_cast<size_t>(m)]; }
MaxFeatures parse_max_features(const std::string& s) {
  for (size_t i = 0; i < 3; ++i)
    if (kMaxFeatNames[i] == s) return static_cast<MaxFeatures>(i);
  throw InputError("unknown max_features '" + s + "'");
}

std::string ClassifierConfig::params_id() const {
  std::ostringstream ss;
  switch (algorithm) {
    case Algorithm::NaiveBayes:
      ss << "var_smoothing=" << nb.var_smoothing;
      break;
    case Algorithm::DecisionTree:
      ss << "criterion=" << to_string(dt.criterion)
         << ",max_depth=" << (dt.max_depth ? std::to_string(*dt.max_depth) : "none")
         << ",min_samples_leaf=" << dt.min_samples_leaf
         << ",min_samples_split=" << dt.min_samples_split
         << ",splitter=" << to_string(dt.splitter);
      break;
    case Algorithm::RandomForest:
      ss << "max_features=" << to_string(rf.max_features)
         << ",n_estimators=" << rf.n_estimators;
      break;
    case Algorithm::LinearSvm:
      ss << "epochs=" << svm.epochs << ",lambda=" << svm.lambda;
      break;
  }
  return ss.str();
}

uint64_t ClassifierConfig::model_size_key() const {
  switch (algorithm) {
    case Algorithm::NaiveBayes:
      return 0;
    case Algorithm::LinearSvm:
      return 1;
    case Algorithm::DecisionTree:
      return 10 + (dt.max_depth ? std::min<uint64_t>(*dt.max_depth, 1000) : 1000);
    case Algorithm::RandomForest:
      return 100000 + rf.n_estimators;
  }
  return 0;
}

nlohmann::json ClassifierConfig::to_json() const {
  nlohmann::json j{{"algorithm", to_string(algorithm)}};
  switch (algorithm) {
    case Algorithm::NaiveBayes:
      j["var_smoothing"] = nb.var_smoothing;
      break;
    case Algorithm::DecisionTree:
      j["criterion"] = to_string(dt.criterion);
      j["max_depth"] = dt.max_depth ? nlohmann::json(*dt.max_depth) : nlohmann::json(nullptr);
      j["min_samples_leaf"] = dt.min_samples_leaf;
      j["min_samples_split"] = dt.min_samples_split;
      j["splitter"] = to_string(dt.splitter);
      break;
    case Algorithm::RandomForest:
      j["max_features"] = to_string(rf.max_features);
      j["n_estimators"] = rf.n_estimators;
      j["bootstrap"] = rf.bootstrap;
      break;
    case Algorithm::LinearSvm:
      j["lambda"] = svm.lambda;
      j["epochs"] = svm.epochs;
      break;
  }
  return j;
}

ClassifierConfig ClassifierConfig::from_json(const nlohmann::json& j) {
  ClassifierConfig c;
  c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
  switch (c.algorithm) {
    case Algorithm::NaiveBayes:
      if (j.contains("var_smoothing")) c.nb.var_smoothing = j["var_smoothing"].get<double>();
      break;
    case Algorithm::DecisionTree:
      c.dt.criterion = parse_criterion(j.at("criterion").get<std::string>());
      if (!j.at("max_depth").is_null()) c.dt.max_depth = j["max_depth"].get<size_t>();
      c.dt.min_samples_leaf = j.at("min_samples_leaf").get<size_t>();
      c.dt.min_samples_split = j.at("min_samples_split").get<size_t>();
      c.dt.splitter = parse_splitter(j.at("splitter").get<std::string>());
      break;
    case Algorithm::RandomForest:
      c.rf.max_features = parse_max_features(j.at("max_features").get<std::string>());
      c.rf.n_estimators = j.at("n_estimators").get<size_t>();
      if (j.contains("bootstrap")) c.rf.bootstrap = j["bootstrap"].get<bool>();
      break;
    case Algorithm::LinearSvm:
      c.svm.lambda = j.at("lambda").get<double>();
      c.svm.epochs = j.at("epochs").get<size_t>();
      break;
  }
  return c;
}

namespace {

void validate_training_input(const Matrix& x, const std::vector<int>& y) {
  if (x.rows == 0 || x.rows != y.size())
    throw InputError("fit: matrix rows must match label count and be non-empty");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1)
      has_pos = true;
    else if (v == 0)
      has_neg = true;
    else
      throw InputError("fit: labels must be 0 or 1");
  }
  if (!has_pos || !has_neg) throw InputError("fit: training labels contain a single class");
  for (double v : x.data)
    if (std::isnan(v)) throw InputError("fit: feature matrix contains NaN");
}

// ---- Gaussian naive Bayes ----

NbState fit_nb(const NbParams& params, const Matrix& x, const std::vector<int>& y) {
  NbState s;
  size_t d = x.cols;
  size_t n[2] = {0, 0};
  for (int v : y) n[v]++;
  for (int c = 0; c < 2; ++c) {
    s.log_prior[c] = std::log(static_cast<double>(n[c]) / static_cast<double>(x.rows));
    s.mean[c].assign(d, 0.0);
    s.var[c].assign(d, 0.0);
  }
  for (size_t r = 0; r < x.rows; ++r)
    for (size_t j = 0; j < d; ++j) s.mean[y[r]][j] += x.at(r, j);
  for (int c = 0; c < 2; ++c)
    for (size_t j = 0; j < d; ++j) s.mean[c][j] /= static_cast<double>(n[c]);
  for (size_t r = 0; r < x.rows; ++r)
    for (size_t j = 0; j < d; ++j) {
      double diff = x.at(r, j) - s.mean[y[r]][j];
      s.var[y[r]][j] += diff * diff;
    }
  for (int c = 0; c < 2; ++c)
    for (size_t j = 0; j < d; ++j) s.var[c][j] /= static_cast<double>(n[c]);

  // Smoothing: var_smoothing times the largest overall per-feature variance.
  std::vector<double> overall_mean(d, 0.0), overall_var(d, 0.0);
  for (size_t r = 0; r < x.rows; ++r)
    for (size_t j = 0; j < d; ++j) overall_mean[j] += x.at(r, j);
  for (size_t j = 0; j < d; ++j) overall_mean[j] /= static_cast<double>(x.rows);
  for (size_t r = 0; r < x.rows; ++r)
    for (size_t j = 0; j < d; ++j) {
      double diff = x.at(r, j) - overall_mean[j];
      overall_var[j] += diff * diff;
    }
  double max_var = 0.0;
  for (size_t j = 0; j < d; ++j) max_var = std::max(max_var, overall_var[j] / x.rows);
  double eps = params.var_smoothing * max_var;
  if (eps <= 0.0) eps = 1e-12;
  for (int c = 0; c < 2; ++c)
    for (size_t j = 0; j < d; ++j) s.var[c][j] += eps;
  return s;
}

double nb_score(const NbState& s, std::span<const double> x) {
  double lp[2];
  for (int c = 0; c < 2; ++c) {
    lp[c] = s.log_prior[c];
    for (size_t j = 0; j < x.size(); ++j) {
      double diff = x[j] - s.mean[c][j];
      lp[c] += -0.5 * std::log(2.0 * M_PI * s.var[c][j]) - diff * diff / (2.0 * s.var[c][j]);
    }
  }
  // p(1|x) computed stably from the log-odds.
  return 1.0 / (1.0 + std::exp(lp[0] - lp[1]));
}

// ---- Decision tree ----

double impurity(SplitCriterion criterion, size_t pos, size_t n) {
  if (n == 0) return 0.0;
  double p = static_cast<double>(pos) / static_cast<double>(n);
  if (criterion == SplitCriterion::Gini) return 1.0 - p * p - (1.0 - p) * (1.0 - p);
  double h = 0.0;
  if (p > 0.0) h -= p * std::log2(p);
  if (p < 1.0) h -= (1.0 - p) * std::log2(1.0 - p);
  return h;
}

struct TreeBuilder {
  const Matrix& x;
  const std::vector<int>& y;
  const DtParams& params;
  size_t max_features;  // number of features examined per split
  Rng& rng;
  std::vector<TreeNode> nodes;

  // Features examined at a node: all of them (in index order) when
  // max_features == d, otherwise a random subset. Skipping the draw when all
  // features are used keeps a full-feature forest tree identical to a plain
  // decision tree regardless of RNG state.
  std::vector<size_t> feature_subset() {
    size_t d = x.cols;
    std::vector<size_t> feats(d);
    std::iota(feats.begin(), feats.end(), 0);
    if (max_features >= d) return feats;
    for (size_t i = 0; i < max_features; ++i) {
      size_t j = i + static_cast<size_t>(rng.below(d - i));
      std::swap(feats[i], feats[j]);
    }
    feats.resize(max_features);
    std::sort(feats.begin(), feats.end());  // deterministic tie-breaking order
    return feats;
  }

  int32_t build(std::vector<size_t>& idx, size_t depth) {
    size_t n = idx.size();
    size_t pos = 0;
    for (size_t r : idx) pos += static_cast<size_t>(y[r]);
    auto node_id = static_cast<int32_t>(nodes.size());
    nodes.emplace_back();
    nodes[node_id].positive_fraction = static_cast<double>(pos) / static_cast<double>(n);

    bool pure = pos == 0 || pos == n;
    bool depth_done = params.max_depth && depth >= *params.max_depth;
    if (pure || depth_done || n < params.min_samples_split) return node_id;

    double parent_impurity = impurity(params.criterion, pos, n);
    int best_feature = -1;
    double best_threshold = 0.0;
    double best_improvement = -1.0;

    std::vector<double> values;
    for (size_t f : feature_subset()) {
      values.clear();
      for (size_t r : idx) values.push_back(x.at(r, f));
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      if (values.size() < 2) continue;
      std::vector<double> candidates;
      if (params.splitter == Splitter::Random) {
        size_t c = static_cast<size_t>(rng.below(values.size() - 1));
        candidates.push_back((values[c] + values[c + 1]) / 2.0);
      } else {
        for (size_t c = 0; c + 1 < values.size(); ++c)
          candidates.push_back((values[c] + values[c + 1]) / 2.0);
      }
      for (double t : candidates) {
        size_t left_n = 0, left_pos = 0;
        for (size_t r : idx) {
          if (x.at(r, f) <= t) {
            ++left_n;
            left_pos += static_cast<size_t>(y[r]);
          }
        }
        size_t right_n = n - left_n;
        if (left_n < params.min_samples_leaf || right_n < params.min_samples_leaf) continue;
        double w_left = static_cast<double>(left_n) / static_cast<double>(n);
        double child =
            w_left * impurity(params.criterion, left_pos, left_n) +
            (1.0 - w_left) * impurity(params.criterion, pos - left_pos, right_n);
        double improvement = parent_impurity - child;
        // Strict improvement comparison fixes ties at the lowest feature
        // index, then the lowest threshold.
        if (improvement > best_improvement + 1e-15) {
          best_improvement = improvement;
          best_feature = static_cast<int>(f);
          best_threshold = t;
        }
      }
    }
    if (best_feature < 0) return node_id;

    std::vector<size_t> left_idx, right_idx;
    for (size_t r : idx)
      (x.at(r, static_cast<size_t>(best_feature)) <= best_threshold ? left_idx : right_idx)
          .push_back(r);
    nodes[node_id].feature = best_feature;
    nodes[node_id].threshold = best_threshold;
    int32_t left = build(left_idx, depth + 1);
    int32_t right = build(right_idx, depth + 1);
    nodes[node_id].left = left;
    nodes[node_id].right = right;
    return node_id;
  }
};

DtState fit_tree(const DtParams& params, const Matrix& x, const std::vector<int>& y,
                 const std::vector<size_t>& idx, size_t max_features, Rng& rng) {
  TreeBuilder builder{x, y, params, max_features, rng, {}};
  std::vector<size_t> rows = idx;
  builder.build(rows, 0);
  return DtState{std::move(builder.nodes)};
}

double tree_score(const DtState& tree, std::span<const double> x) {
  size_t node = 0;
  while (!tree.nodes[node].is_leaf()) {
    const auto& nd = tree.nodes[node];
    node = x[static_cast<size_t>(nd.feature)] <= nd.threshold
               ? static_cast<size_t>(nd.left)
               : static_cast<size_t>(nd.right);
  }
  return tree.nodes[node].positive_fraction;
}

size_t resolve_max_features(MaxFeatures mf, size_t d) {
  switch (mf) {
    case MaxFeatures::Auto:
      return std::max<size_t>(1, static_cast<size_t>(std::sqrt(static_cast<double>(d))));
    case MaxFeatures::Log2:
      return std::max<size_t>(1, static_cast<size_t>(std::log2(static_cast<double>(d))));
    case MaxFeatures::None:
      return d;
  }
  return d;
}

RfState fit_forest(const RfParams& params, const Matrix& x, const std::vector<int>& y,
                   uint64_t seed) {
  if (params.n_estimators == 0) throw InputError("random forest needs n_estimators >= 1");
  RfState forest;
  forest.trees.resize(params.n_estimators);
  size_t mf = resolve_max_features(params.max_features, x.cols);
  for (size_t t = 0; t < params.n_estimators; ++t) {
    Rng rng(derive_seed(seed, "tree/" + std::to_string(t)));
    std::vector<size_t> rows(x.rows);
    if (params.bootstrap) {
      for (size_t i = 0; i < x.rows; ++i) rows[i] = static_cast<size_t>(rng.below(x.rows));
      std::sort(rows.begin(), rows.end());
    } else {
      std::iota(rows.begin(), rows.end(), 0);
    }
    forest.trees[t] = fit_tree(params.tree, x, y, rows, mf, rng);
  }
  return forest;
}

double forest_score(const RfState& forest, std::span<const double> x) {
  size_t votes = 0;
  for (const auto& tree : forest.trees)
    if (tree_score(tree, x) >= 0.5) ++votes;
  return static_cast<double>(votes) / static_cast<double>(forest.trees.size());
}

// ---- Linear SVM (hinge loss, epoch-based subgradient descent) ----

SvmState fit_svm(const SvmParams& params, const Matrix& x, const std::vector<int>& y,
                 uint64_t seed) {
  SvmState s;
  s.weights.assign(x.cols, 0.0);
  Rng rng(derive_seed(seed, "svm"));
  std::vector<size_t> order(x.rows);
  std::iota(order.begin(), order.end(), 0);
  size_t t = 0;
  for (size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    for (size_t r : order) {
      ++t;
      double lr = 1.0 / (params.lambda * static_cast<double>(t));
      double label = y[r] == 1 ? 1.0 : -1.0;
      double margin = s.bias;
      for (size_t j = 0; j < x.cols; ++j) margin += s.weights[j] * x.at(r, j);
      double decay = 1.0 - lr * params.lambda;  // = 1 - 1/t
      for (double& w : s.weights) w *= decay;
      if (label * margin < 1.0) {
        for (size_t j = 0; j < x.cols; ++j) s.weights[j] += lr * label * x.at(r, j);
        s.bias += lr * label;
      }
    }
  }
  return s;
}

double svm_score(const SvmState& s, std::span<const double> x) {
  double margin = s.bias;
  for (size_t j = 0; j < x.size(); ++j) margin += s.weights[j] * x[j];
  if (margin > 40.0) return 1.0;
  if (margin < -40.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-margin));
}

}  // namespace

TrainedClassifier fit_classifier(const ClassifierConfig& config, const Matrix& x,
                                 const std::vector<int>& y, uint64_t seed) {
  validate_training_input(x, y);
  TrainedClassifier model;
  model.config = config;
  model.feature_dimension = x.cols;
  model.seed = seed;
  switch (config.algorithm) {
    case Algorithm::NaiveBayes:
      model.state = fit_nb(config.nb, x, y);
      break;
    case Algorithm::DecisionTree: {
      Rng rng(derive_seed(seed, "tree/0"));
      std::vector<size_t> rows(x.rows);
      std::iota(rows.begin(), rows.end(), 0);
      model.state = fit_tree(config.dt, x, y, rows, x.cols, rng);
      break;
    }
    case Algorithm::RandomForest:
      model.state = fit_forest(config.rf, x, y, seed);
      break;
    case Algorithm::LinearSvm:
      model.state = fit_svm(config.svm, x, y, seed);
      break;
  }
  return model;
}

double predict_score(const TrainedClassifier& model, std::span<const double> x) {
  if (x.size() != model.feature_dimension)
    throw InputError("predict: feature dimension mismatch (" + std::to_string(x.size()) +
                     " vs " + std::to_string(model.feature_dimension) + ")");
  if (const auto* nb = std::get_if<NbState>(&model.state)) return nb_score(*nb, x);
  if (const auto* dt = std::get_if<DtState>(&model.state)) return tree_score(*dt, x);
  if (const auto* rf = std::get_if<RfState>(&model.state)) return forest_score(*rf, x);
  return svm_score(std::get<SvmState>(model.state), x);
}

int predict(const TrainedClassifier& model, std::span<const double> x) {
  return predict_score(model, x) >= 0.5 ? 1 : 0;
}

std::vector<double> predict_scores(const TrainedClassifier& model, const Matrix& x) {
  std::vector<double> scores(x.rows);
  for (size_t r = 0; r < x.rows; ++r) scores[r] = predict_score(model, x.row(r));
  return scores;
}

namespace {

nlohmann::json tree_to_json(const DtState& tree) {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : tree.nodes)
    nodes.push_back({n.feature, n.threshold, n.left, n.right, n.positive_fraction});
  return nodes;
}

DtState tree_from_json(const nlohmann::json& j) {
  DtState tree;
  for (const auto& n : j) {
    TreeNode node;
    node.feature = n.at(0).get<int32_t>();
    node.threshold = n.at(1).get<double>();
    node.left = n.at(2).get<int32_t>();
    node.right = n.at(3).get<int32_t>();
    node.positive_fraction = n.at(4).get<double>();
    tree.nodes.push_back(node);
  }
  return tree;
}

}  // namespace

nlohmann::json TrainedClassifier::to_json() const {
  nlohmann::json j;
  j["config"] = config.to_json();
  j["feature_dimension"] = feature_dimension;
  j["seed"] = seed;
  j["positive_class"] =
      positive_class ? nlohmann::json(to_string(*positive_class)) : nlohmann::json(nullptr);
  if (const auto* nb = std::get_if<NbState>(&state)) {
    j["state"] = {{"kind", "nb"},
                  {"log_prior", {nb->log_prior[0], nb->log_prior[1]}},
                  {"mean0", nb->mean[0]},
                  {"mean1", nb->mean[1]},
                  {"var0", nb->var[0]},
                  {"var1", nb->var[1]}};
  } else if (const auto* dt = std::get_if<DtState>(&state)) {
    j["state"] = {{"kind", "dt"}, {"nodes", tree_to_json(*dt)}};
  } else if (const auto* rf = std::get_if<RfState>(&state)) {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : rf->trees) trees.push_back(tree_to_json(t));
    j["state"] = {{"kind", "rf"}, {"trees", trees}};
  } else {
    const auto& svm = std::get<SvmState>(state);
    j["state"] = {{"kind", "svm"}, {"weights", svm.weights}, {"bias", svm.bias}};
  }
  return j;
}

TrainedClassifier TrainedClassifier::from_json(const nlohmann::json& j) {
  TrainedClassifier m;
  m.config = ClassifierConfig::from_json(j.at("config"));
  m.feature_dimension = j.at("feature_dimension").get<size_t>();
  m.seed = j.at("seed").get<uint64_t>();
  if (!j.at("positive_class").is_null())
    m.positive_class = parse_label(j["positive_class"].get<std::string>());
  const auto& st = j.at("state");
  std::string kind = st.at("kind").get<std::string>();
  if (kind == "nb") {
    NbState nb;
    nb.log_prior[0] = st.at("log_prior").at(0).get<double>();
    nb.log_prior[1] = st.at("log_prior").at(1).get<double>();
    nb.mean[0] = st.at("mean0").get<std::vector<double>>();
    nb.mean[1] = st.at("mean1").get<std::vector<double>>();
    nb.var[0] = st.at("var0").get<std::vector<double>>();
    nb.var[1] = st.at("var1").get<std::vector<double>>();
    m.state = std::move(nb);
  } else if (kind == "dt") {
    m.state = tree_from_json(st.at("nodes"));
  } else if (kind == "rf") {
    RfState rf;
    for (const auto& t : st.at("trees")) rf.trees.push_back(tree_from_json(t));
    m.state = std::move(rf);
  } else if (kind == "svm") {
    SvmState svm;
    svm.weights = st.at("weights").get<std::vector<double>>();
    svm.bias = st.at("bias").get<double>();
    m.state = std::move(svm);
  } else {
    throw InputError("unknown classifier state kind '" + kind + "'");
  }
  return m;
}

}  // namespace feedkit
