#pragma once

#include <map>
#include <string>
#include <vector>

#include "feedkit/experiments.hpp"

namespace feedkit {

// Benchmark configuration file (JSON). Paths are resolved relative to the
// config file's directory. Shape:
//
// {
//   "datasets": [{"id": "toy", "path": "toy.jsonl", "format": "jsonl"}],
//   "classes": ["problem_report", "inquiry", "irrelevant"],
//   "approaches": ["traditional", "deep"],
//   "split": {"ratio": 0.8},
//   "data_dir": "data",
//   "embeddings": {"EN": "vectors_en.txt"},
//   "embedding_dim": 300,
//   "tfidf": {"min_df": 2, "max_df": 0.8},
//   "traditional": {
//     "feature_combinations": "default" | [["sentiment","tfidf"], ...],
//     "scaling": [false, true],
//     "sampling": [false, true],
//     "algorithms": "default" | [{"algorithm": "decision_tree", ...grids...}]
//   },
//   "cnn": {"number_filters": [16], "kernel_sizes": [3,5], "dense_units": [16,32],
//           "sampling": true, "scaling": true, "epochs": 7, "batch_size": 32},
//   "cv": {"traditional_folds": 5, "cnn_folds": 3}
// }
struct RunConfigFile {
  BenchmarkConfig benchmark;
  std::string data_dir = "data";
  std::map<Language, std::string> embedding_paths;
  size_t embedding_dim = 300;
  std::vector<std::string> dataset_paths;  // for manifest input hashing
};

RunConfigFile parse_benchmark_config(const std::string& config_path);

// Per-algorithm hyperparameter grids expanded to the cartesian product of the
// listed values, e.g. {"algorithm":"decision_tree","criterion":["gini"],
// "max_depth":[1,null],...}.
std::vector<ClassifierConfig> expand_algorithm_grid(const nlohmann::json& spec);

}  // namespace feedkit
