#include "feedkit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include "feedkit/errors.hpp"

namespace feedkit {

namespace {

void check_binary(std::span<const int> y) {
  for (int v : y)
    if (v != 0 && v != 1) throw InputError("labels must be 0 or 1");
}

}  // namespace

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred) {
  if (y_true.size() != y_pred.size())
    throw InputError("confusion: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                     std::to_string(y_pred.size()) + ")");
  if (y_true.empty()) throw InputError("confusion: empty input");
  check_binary(y_true);
  check_binary(y_pred);
  ConfusionCounts c;
  for (size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 1)
      (y_pred[i] == 1 ? c.tp : c.fn)++;
    else
      (y_pred[i] == 1 ? c.fp : c.tn)++;
  }
  return c;
}

Prf precision_recall_f1(const ConfusionCounts& c) {
  Prf r;
  if (c.tp + c.fp > 0)
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  else
    r.zero_division = true;
  if (c.tp + c.fn > 0)
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  else
    r.zero_division = true;
  if (r.precision + r.recall > 0.0)
    r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  else
    r.zero_division = true;
  return r;
}

double roc_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw InputError("roc_auc: length mismatch");
  if (y_true.empty()) throw InputError("roc_auc: empty input");
  check_binary(y_true);
  size_t n_pos = 0;
  for (int v : y_true) n_pos += static_cast<size_t>(v);
  size_t n_neg = y_true.size() - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw InputError("roc_auc requires both classes in y_true");

  std::vector<size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  // Mid-ranks over tie groups, 1-based.
  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (size_t k = i; k < j; ++k)
      if (y_true[order[k]] == 1) rank_sum_pos += mid_rank;
    i = j;
  }
  double p = static_cast<double>(n_pos), n = static_cast<double>(n_neg);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * n);
}

double pr_auc(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw InputError("pr_auc: length mismatch");
  if (y_true.empty()) throw InputError("pr_auc: empty input");
  check_binary(y_true);
  size_t n_pos = 0;
  for (int v : y_true) n_pos += static_cast<size_t>(v);
  if (n_pos == 0) throw InputError("pr_auc requires at least one positive example");

  std::vector<size_t> order(y_true.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return scores[a] > scores[b]; });
  double ap = 0.0;
  double recall_prev = 0.0;
  size_t tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    for (size_t k = i; k < j; ++k)
      (y_true[order[k]] == 1 ? tp : fp)++;
    double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j;
  }
  return ap;
}

nlohmann::json MetricReport::to_json() const {
  return nlohmann::json{{"precision", precision},
                        {"recall", recall},
                        {"f1", f1},
                        {"roc_auc", roc_auc},
                        {"pr_auc", pr_auc},
                        {"tp", confusion.tp},
                        {"fp", confusion.fp},
                        {"tn", confusion.tn},
                        {"fn", confusion.fn},
                        {"support_pos", support_pos},
                        {"support_neg", support_neg},
                        {"zero_division", zero_division}};
}

MetricReport MetricReport::from_json(const nlohmann::json& j) {
  MetricReport r;
  r.precision = j.at("precision").get<double>();
  r.recall = j.at("recall").get<double>();
  r.f1 = j.at("f1").get<double>();
  r.roc_auc = j.at("roc_auc").get<double>();
  r.pr_auc = j.at("pr_auc").get<double>();
  r.confusion.tp = j.at("tp").get<size_t>();
  r.confusion.fp = j.at("fp").get<size_t>();
  r.confusion.tn = j.at("tn").get<size_t>();
  r.confusion.fn = j.at("fn").get<size_t>();
  r.support_pos = j.at("support_pos").get<size_t>();
  r.support_neg = j.at("support_neg").get<size_t>();
  r.zero_division = j.at("zero_division").get<bool>();
  return r;
}

MetricReport evaluate(std::span<const int> y_true, std::span<const double> scores) {
  if (y_true.size() != scores.size()) throw InputError("evaluate: length mismatch");
  std::vector<int> preds(y_true.size());
  for (size_t i = 0; i < y_true.size(); ++i) preds[i] = scores[i] >= 0.5 ? 1 : 0;
  MetricReport r;
  r.confusion = confusion(y_true, preds);
  Prf prf = precision_recall_f1(r.confusion);
  r.precision = prf.precision;
  r.recall = prf.recall;
  r.f1 = prf.f1;
  r.zero_division = prf.zero_division;
  r.roc_auc = roc_auc(y_true, scores);
  r.pr_auc = pr_auc(y_true, scores);
  r.support_pos = r.confusion.tp + r.confusion.fn;
  r.support_neg = r.confusion.fp + r.confusion.tn;
  return r;
}

}  // namespace feedkit
