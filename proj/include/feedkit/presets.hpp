#pragma once

#include <string>
#include <vector>

#include "feedkit/experiments.hpp"

namespace feedkit {

// A shipped best-known configuration, one per (approach, dataset, class).
// Names follow "<trad|dl>/<dataset>/<class>", e.g.
// "trad/app_review_EN/problem_report" or "dl/tweet_IT/inquiry".
struct Preset {
  std::string name;
  Approach approach = Approach::Traditional;
  std::string dataset;  // app_review_EN, tweet_EN, tweet_IT
  Language language = Language::EN;
  LabelClass positive = LabelClass::ProblemReport;
  bool sampling = false;
  bool scaling = false;
  // Traditional arm:
  FeatureCombo features;
  ClassifierConfig classifier;
  // Deep arm:
  size_t dense_units = 32;
  size_t kernel_size = 5;
  size_t number_filters = 16;
};

const std::vector<Preset>& all_presets();
std::vector<std::string> preset_names();
const Preset& load_preset(const std::string& name);

}  // namespace feedkit
