#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "feedkit/errors.hpp"
#include "json.hpp"

namespace feedkit {

struct ConfusionCounts {
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
  size_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

ConfusionCounts confusion(std::span<const int> y_true, std::span<const int> y_pred);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool zero_division = false;  // flagged when a denominator was zero
};

// Positive-class precision/recall/f1 with the zero convention: a zero
// denominator yields 0 and sets the flag.
Prf precision_recall_f1(const ConfusionCounts& c);

// Mann-Whitney formulation: probability that a random positive outranks a
// random negative, ties counting one half. Requires both classes present.
double roc_auc(std::span<const int> y_true, std::span<const double> scores);

// Average precision: area under the precision-recall step curve swept in
// descending score order, tied scores processed as one group. Requires at
// least one positive.
double pr_auc(std::span<const int> y_true, std::span<const double> scores);

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double roc_auc = 0.0;
  double pr_auc = 0.0;
  ConfusionCounts confusion;
  size_t support_pos = 0;
  size_t support_neg = 0;
  bool zero_division = false;

  nlohmann::json to_json() const;
  static MetricReport from_json(const nlohmann::json& j);
};

// Thresholds scores at 0.5 and computes the full report. Requires both
// classes present in y_true (for the AUCs).
MetricReport evaluate(std::span<const int> y_true, std::span<const double> scores);

}  // namespace feedkit
