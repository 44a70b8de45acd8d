#include "feedkit/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "feedkit/hash.hpp"
#include "feedkit/rng.hpp"

namespace feedkit {

void EmbeddingTable::add_word(std::string word, std::vector<double> vec) {
  if (vec.size() != dimension) throw Error("embedding vector dimension mismatch");
  if (!index.emplace(word, words.size()).second)
    throw InputError("duplicate word '" + word + "' in embedding table");
  words.push_back(std::move(word));
  vectors.push_back(std::move(vec));
}

EmbeddingTable load_embeddings(const std::string& path, size_t expected_dim) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw InputError(path + ": empty file");
  size_t n = 0, dim = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> dim)) throw InputError(path + ":1: expected header 'count dimension'");
  }
  if (dim != expected_dim)
    throw InputError(path + ": dimension is " + std::to_string(dim) + ", expected " +
                     std::to_string(expected_dim));
  EmbeddingTable table;
  table.dimension = dim;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) throw InputError(path + ":" + std::to_string(lineno) + ": missing word");
    std::vector<double> vec(dim);
    for (size_t d = 0; d < dim; ++d)
      if (!(ls >> vec[d]))
        throw InputError(path + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(dim) + " values for '" + word + "'");
    double extra;
    if (ls >> extra)
      throw InputError(path + ":" + std::to_string(lineno) + ": too many values for '" + word + "'");
    try {
      table.add_word(std::move(word), std::move(vec));
    } catch (const InputError& e) {
      throw InputError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (table.words.size() != n)
    throw InputError(path + ": header declares " + std::to_string(n) + " words, found " +
                     std::to_string(table.words.size()));
  return table;
}

void save_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << table.words.size() << " " << table.dimension << "\n";
  char buf[32];
  for (size_t i = 0; i < table.words.size(); ++i) {
    out << table.words[i];
    for (double v : table.vectors[i]) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << " " << buf;
    }
    out << "\n";
  }
}

std::vector<std::string> char_ngrams(const std::string& word, size_t nmin, size_t nmax) {
  std::string wrapped = "<" + word + ">";
  std::vector<std::string> grams;
  for (size_t n = nmin; n <= nmax; ++n) {
    if (wrapped.size() < n) break;
    for (size_t i = 0; i + n <= wrapped.size(); ++i) grams.push_back(wrapped.substr(i, n));
  }
  return grams;
}

uint32_t subword_hash(const std::string& ngram) {
  uint32_t h = 2166136261u;
  for (unsigned char c : ngram) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

std::vector<double> vector_for_word(const EmbeddingTable& table, const std::string& word) {
  if (auto it = table.index.find(word); it != table.index.end()) return table.vectors[it->second];
  std::vector<double> v(table.dimension, 0.0);
  if (table.bucket_count == 0 || table.buckets.empty()) return v;
  auto grams = char_ngrams(word, table.ngram_min, table.ngram_max);
  if (grams.empty()) return v;
  for (const auto& g : grams) {
    const auto& bucket = table.buckets[subword_hash(g) % table.bucket_count];
    for (size_t d = 0; d < table.dimension; ++d) v[d] += bucket[d];
  }
  for (double& x : v) x /= static_cast<double>(grams.size());
  return v;
}

std::vector<double> document_vector(const EmbeddingTable& table, const ProcessedText& p) {
  std::vector<double> v(table.dimension, 0.0);
  if (p.tokens.empty()) return v;
  for (const auto& tok : p.tokens) {
    auto wv = vector_for_word(table, tok.surface);
    for (size_t d = 0; d < table.dimension; ++d) v[d] += wv[d];
  }
  for (double& x : v) x /= static_cast<double>(p.tokens.size());
  return v;
}

void SkipgramConfig::validate() const {
  if (dimension == 0 || window == 0 || negatives == 0 || epochs == 0 || min_count == 0 ||
      learning_rate <= 0.0 || ngram_min == 0 || ngram_max < ngram_min || bucket_count == 0)
    throw InputError("invalid skip-gram configuration: all parameters must be positive");
}

namespace {

double sigmoid(double x) {
  if (x > 40.0) return 1.0;
  if (x < -40.0) return 0.0;
  return 1.0 / (1.0 + std::exp(-x));
}

}  // namespace

SkipgramResult train_skipgram(const std::vector<ProcessedText>& corpus,
                              const SkipgramConfig& cfg, uint64_t seed) {
  cfg.validate();
  size_t total_tokens = 0;
  for (const auto& p : corpus) total_tokens += p.tokens.size();
  if (total_tokens < 100)
    throw InputError("corpus too small for embedding training: " + std::to_string(total_tokens) +
                     " tokens (need at least 100)");

  // Vocabulary ordered by count desc, then lexicographically.
  std::unordered_map<std::string, size_t> counts;
  for (const auto& p : corpus)
    for (const auto& tok : p.tokens) counts[tok.surface]++;
  std::vector<std::pair<std::string, size_t>> vocab_items;
  for (auto& [w, c] : counts)
    if (c >= cfg.min_count) vocab_items.emplace_back(w, c);
  std::sort(vocab_items.begin(), vocab_items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (vocab_items.empty()) throw InputError("no vocabulary after min_count filtering");
  size_t vocab_size = vocab_items.size();
  std::unordered_map<std::string, size_t> word_id;
  for (size_t i = 0; i < vocab_size; ++i) word_id[vocab_items[i].first] = i;

  // Precompute per-word subword bucket ids.
  std::vector<std::vector<uint32_t>> word_buckets(vocab_size);
  if (cfg.subwords) {
    for (size_t i = 0; i < vocab_size; ++i)
      for (const auto& g : char_ngrams(vocab_items[i].first, cfg.ngram_min, cfg.ngram_max))
        word_buckets[i].push_back(subword_hash(g) % cfg.bucket_count);
  }

  size_t dim = cfg.dimension;
  Rng rng(derive_seed(seed, "skipgram"));
  auto init_vec = [&](std::vector<double>& v) {
    v.resize(dim);
    for (double& x : v) x = (rng.real() - 0.5) / static_cast<double>(dim);
  };
  std::vector<std::vector<double>> in_word(vocab_size), out_word(vocab_size), in_bucket;
  for (auto& v : in_word) init_vec(v);
  if (cfg.subwords) {
    in_bucket.resize(cfg.bucket_count);
    for (auto& v : in_bucket) init_vec(v);
  }
  for (auto& v : out_word) v.assign(dim, 0.0);

  // Negative-sampling table, unigram counts raised to 0.75.
  const size_t table_size = 1 << 17;
  std::vector<uint32_t> unigram(table_size);
  {
    double total = 0.0;
    for (const auto& [w, c] : vocab_items) total += std::pow(static_cast<double>(c), 0.75);
    size_t i = 0;
    double cum = std::pow(static_cast<double>(vocab_items[0].second), 0.75) / total;
    for (size_t t = 0; t < table_size; ++t) {
      unigram[t] = static_cast<uint32_t>(i);
      if (static_cast<double>(t) / table_size > cum && i < vocab_size - 1) {
        ++i;
        cum += std::pow(static_cast<double>(vocab_items[i].second), 0.75) / total;
      }
    }
  }

  // Sentences as in-vocabulary word ids.
  std::vector<std::vector<uint32_t>> sentences;
  size_t train_words = 0;
  for (const auto& p : corpus) {
    std::vector<uint32_t> s;
    for (const auto& tok : p.tokens)
      if (auto it = word_id.find(tok.surface); it != word_id.end())
        s.push_back(static_cast<uint32_t>(it->second));
    train_words += s.size();
    if (s.size() >= 2) sentences.push_back(std::move(s));
  }
  if (sentences.empty()) throw InputError("corpus has no usable sentences");

  std::vector<double> h(dim), grad_h(dim);
  std::vector<double> epoch_loss;
  size_t words_done = 0;
  const double total_words = static_cast<double>(cfg.epochs * train_words) + 1.0;

  auto compose = [&](size_t w, std::vector<double>& out) {
    out = in_word[w];
    if (word_buckets[w].empty()) return;
    for (uint32_t b : word_buckets[w])
      for (size_t d = 0; d < dim; ++d) out[d] += in_bucket[b][d];
    double parts = 1.0 + static_cast<double>(word_buckets[w].size());
    for (double& x : out) x /= parts;
  };

  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    size_t pairs = 0;
    for (const auto& s : sentences) {
      for (size_t i = 0; i < s.size(); ++i) {
        ++words_done;
        double lr = cfg.learning_rate *
                    std::max(1e-4, 1.0 - static_cast<double>(words_done) / total_words);
        size_t span = 1 + static_cast<size_t>(rng.below(cfg.window));
        size_t lo = i >= span ? i - span : 0;
        size_t hi = std::min(s.size() - 1, i + span);
        for (size_t j = lo; j <= hi; ++j) {
          if (j == i) continue;
          size_t center = s[i];
          compose(center, h);
          std::fill(grad_h.begin(), grad_h.end(), 0.0);
          for (size_t neg = 0; neg <= cfg.negatives; ++neg) {
            size_t target;
            double label;
            if (neg == 0) {
              target = s[j];
              label = 1.0;
            } else {
              target = unigram[rng.below(table_size)];
              if (target == s[j]) continue;
              label = 0.0;
            }
            auto& u = out_word[target];
            double dot = 0.0;
            for (size_t d = 0; d < dim; ++d) dot += u[d] * h[d];
            double sig = sigmoid(dot);
            loss_sum += label > 0.5 ? -std::log(std::max(sig, 1e-12))
                                    : -std::log(std::max(1.0 - sig, 1e-12));
            double g = sig - label;
            for (size_t d = 0; d < dim; ++d) {
              grad_h[d] += g * u[d];
              u[d] -= lr * g * h[d];
            }
          }
          // The composed input is a mean, so each component gets grad/parts.
          size_t parts = 1 + word_buckets[center].size();
          double scale = lr / static_cast<double>(parts);
          for (size_t d = 0; d < dim; ++d) in_word[center][d] -= scale * grad_h[d];
          for (uint32_t b : word_buckets[center])
            for (size_t d = 0; d < dim; ++d) in_bucket[b][d] -= scale * grad_h[d];
          ++pairs;
        }
      }
    }
    epoch_loss.push_back(pairs > 0 ? loss_sum / static_cast<double>(pairs) : 0.0);
  }

  SkipgramResult result;
  result.table.dimension = dim;
  result.table.ngram_min = cfg.ngram_min;
  result.table.ngram_max = cfg.ngram_max;
  for (size_t i = 0; i < vocab_size; ++i) {
    std::vector<double> composed;
    compose(i, composed);
    result.table.add_word(vocab_items[i].first, std::move(composed));
  }
  if (cfg.subwords) {
    result.table.bucket_count = cfg.bucket_count;
    result.table.buckets = std::move(in_bucket);
  }
  result.epoch_loss = std::move(epoch_loss);
  return result;
}

}  // namespace feedkit
