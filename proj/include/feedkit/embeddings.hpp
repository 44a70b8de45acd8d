#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "feedkit/corpus.hpp"
#include "feedkit/textprep.hpp"

namespace feedkit {

// Word-vector table with an optional hashed-subword section. Lookups never
// fail: known word -> stored vector, unknown word -> mean of its character
// n-gram bucket vectors when buckets exist, zero vector otherwise.
struct EmbeddingTable {
  size_t dimension = 300;
  Language language = Language::EN;
  std::vector<std::string> words;
  std::unordered_map<std::string, size_t> index;
  std::vector<std::vector<double>> vectors;
  size_t ngram_min = 3;
  size_t ngram_max = 6;
  size_t bucket_count = 0;  // 0: no subword section
  std::vector<std::vector<double>> buckets;

  void add_word(std::string word, std::vector<double> vec);
};

// Text format: header "N dim", then one line per word with dim values.
// The standard tables are 300-dimensional; pass expected_dim to accept
// other sizes (e.g. small test fixtures).
EmbeddingTable load_embeddings(const std::string& path, size_t expected_dim = 300);

// Writes the word section in the same text format with round-trip-exact
// floats. Subword buckets are not part of the text format.
void save_embeddings(const EmbeddingTable& table, const std::string& path);

std::vector<double> vector_for_word(const EmbeddingTable& table, const std::string& word);

// Arithmetic mean over the document's token vectors; empty -> zero vector.
std::vector<double> document_vector(const EmbeddingTable& table, const ProcessedText& p);

// Character n-grams of the word wrapped in '<' and '>', in order of
// occurrence, and the FNV-1a 32-bit hash used to bucket them.
std::vector<std::string> char_ngrams(const std::string& word, size_t nmin, size_t nmax);
uint32_t subword_hash(const std::string& ngram);

struct SkipgramConfig {
  size_t dimension = 300;
  size_t window = 5;
  size_t negatives = 5;
  size_t epochs = 5;
  double learning_rate = 0.025;
  size_t min_count = 1;
  size_t ngram_min = 3;
  size_t ngram_max = 6;
  size_t bucket_count = 2000;
  bool subwords = true;

  void validate() const;
};

struct SkipgramResult {
  EmbeddingTable table;
  std::vector<double> epoch_loss;  // mean negative-sampling loss per epoch
};

// Skip-gram with negative sampling over the processed corpus. A word's input
// representation is the mean of its own vector and its n-gram bucket vectors
// (when subwords are enabled); the stored word vectors are those composed
// representations. Single-threaded, bit-deterministic per seed.
SkipgramResult train_skipgram(const std::vector<ProcessedText>& corpus,
                              const SkipgramConfig& cfg, uint64_t seed);

}  // namespace feedkit
