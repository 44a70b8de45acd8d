#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedkit/embeddings.hpp"
#include "feedkit/matrix.hpp"
#include "feedkit/textprep.hpp"
#include "json.hpp"

namespace feedkit {

struct CnnConfig {
  size_t input_length = 200;
  size_t embedding_dim = 300;
  size_t number_filters = 16;
  size_t kernel_size = 3;
  size_t dense_units = 32;
  size_t epochs = 7;
  size_t batch_size = 32;
  double learning_rate = 1e-3;  // Adam, beta1 0.9, beta2 0.999

  void validate() const;
  nlohmann::json to_json() const;
  static CnnConfig from_json(const nlohmann::json& j);
};

// Token index space: PAD = 0 and OOV = 1 (both mapped to zero embedding
// rows), words of the backing table start at 2.
struct VocabIndex {
  static constexpr uint32_t kPad = 0;
  static constexpr uint32_t kOov = 1;
  std::vector<std::string> words;
  std::unordered_map<std::string, uint32_t> word_to_index;
  uint64_t fingerprint = 0;

  size_t size() const { return words.size() + 2; }
  static VocabIndex from_words(std::vector<std::string> words);
};

VocabIndex build_vocab_index(const EmbeddingTable& table);

// Exactly input_length indices: the first input_length tokens, padded at the
// end with PAD.
std::vector<uint32_t> encode_tokens(const ProcessedText& p, const VocabIndex& vocab,
                                    size_t input_length = 200);

// The classifier stack: frozen embedding -> 1D convolution (valid padding,
// stride 1, tanh) -> global max pooling -> dense (tanh) -> 2-way softmax.
// Weights are double precision throughout.
struct CnnModel {
  CnnConfig config;
  Matrix embedding;             // (vocab size) x dim, frozen during training
  std::vector<double> conv_w;   // [kernel][dim][filters]
  std::vector<double> conv_b;   // [filters]
  std::vector<double> dense_w;  // [filters][units]
  std::vector<double> dense_b;  // [units]
  std::vector<double> out_w;    // [units][2]
  std::vector<double> out_b;    // [2]
  uint64_t vocab_fingerprint = 0;

  nlohmann::json to_json() const;
  static CnnModel from_json(const nlohmann::json& j);
};

// Glorot-uniform weights seeded deterministically; embedding rows copied from
// the table (PAD and OOV rows are zero).
CnnModel init_cnn(const CnnConfig& config, const VocabIndex& vocab, const EmbeddingTable& table,
                  uint64_t seed);

// Trainable weights only; the frozen embedding never counts.
size_t count_trainable_params(const CnnConfig& config);

std::vector<std::array<double, 2>> cnn_forward(const CnnModel& model,
                                               const std::vector<std::vector<uint32_t>>& batch);

struct CnnTrainHistory {
  std::vector<double> batch_loss;  // epochs * ceil(n / batch_size) entries
};

// Adam on mini-batches of cross-entropy; example order reshuffled per epoch
// from the seed. Bit-deterministic, single-threaded, embedding untouched.
CnnTrainHistory cnn_train(CnnModel& model, const std::vector<std::vector<uint32_t>>& x,
                          const std::vector<int>& y, uint64_t seed);

// Analytic gradients vs central finite differences on one example, sampled
// across the conv, dense and output tensors (biases included). Returns the
// maximum relative error |a - n| / max(|a|, |n|, 1e-8).
double gradient_check(const CnnModel& model, const std::vector<uint32_t>& example, int label,
                      double epsilon = 1e-5, size_t samples_per_tensor = 24);

// Positive-class probability per sequence.
std::vector<double> cnn_predict_proba(const CnnModel& model,
                                      const std::vector<std::vector<uint32_t>>& x);

uint64_t embedding_checksum(const CnnModel& model);

}  // namespace feedkit
