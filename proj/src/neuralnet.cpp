#include "feedkit/neuralnet.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "feedkit/errors.hpp"
#include "feedkit/hash.hpp"
#include "feedkit/rng.hpp"

namespace feedkit {

void CnnConfig::validate() const {
  if (input_length == 0 || embedding_dim == 0 || number_filters == 0 || kernel_size == 0 ||
      dense_units == 0 || epochs == 0 || batch_size == 0 || learning_rate <= 0.0)
    throw InputError("invalid CNN configuration: all parameters must be positive");
  if (kernel_size > input_length)
    throw InputError("CNN kernel_size must not exceed input_length");
}

nlohmann::json CnnConfig::to_json() const {
  return nlohmann::json{{"input_length", input_length},
                        {"embedding_dim", embedding_dim},
                        {"number_filters", number_filters},
                        {"kernel_size", kernel_size},
                        {"dense_units", dense_units},
                        {"epochs", epochs},
                        {"batch_size", batch_size},
                        {"learning_rate", learning_rate}};
}

CnnConfig CnnConfig::from_json(const nlohmann::json& j) {
  CnnConfig c;
  c.input_length = j.at("input_length").get<size_t>();
  c.embedding_dim = j.at("embedding_dim").get<size_t>();
  c.number_filters = j.at("number_filters").get<size_t>();
  c.kernel_size = j.at("kernel_size").get<size_t>();
  c.dense_units = j.at("dense_units").get<size_t>();
  c.epochs = j.at("epochs").get<size_t>();
  c.batch_size = j.at("batch_size").get<size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  return c;
}

VocabIndex VocabIndex::from_words(std::vector<std::string> word_list) {
  VocabIndex v;
  v.words = std::move(word_list);
  uint64_t h = kFnvOffset64;
  for (size_t i = 0; i < v.words.size(); ++i) {
    v.word_to_index.emplace(v.words[i], static_cast<uint32_t>(i + 2));
    h = fnv1a64(v.words[i], h);
    h = fnv1a64("\n", h);
  }
  v.fingerprint = h;
  return v;
}

VocabIndex build_vocab_index(const EmbeddingTable& table) {
  return VocabIndex::from_words(table.words);
}

std::vector<uint32_t> encode_tokens(const ProcessedText& p, const VocabIndex& vocab,
                                    size_t input_length) {
  std::vector<uint32_t> seq(input_length, VocabIndex::kPad);
  size_t n = std::min(input_length, p.tokens.size());
  for (size_t i = 0; i < n; ++i) {
    auto it = vocab.word_to_index.find(p.tokens[i].surface);
    seq[i] = it != vocab.word_to_index.end() ? it->second : VocabIndex::kOov;
  }
  return seq;
}

size_t count_trainable_params(const CnnConfig& c) {
  return c.kernel_size * c.embedding_dim * c.number_filters + c.number_filters +
         c.number_filters * c.dense_units + c.dense_units + c.dense_units * 2 + 2;
}

CnnModel init_cnn(const CnnConfig& config, const VocabIndex& vocab, const EmbeddingTable& table,
                  uint64_t seed) {
  config.validate();
  if (config.embedding_dim != table.dimension)
    throw InputError("CNN embedding_dim (" + std::to_string(config.embedding_dim) +
                     ") does not match table dimension (" + std::to_string(table.dimension) + ")");
  CnnModel m;
  m.config = config;
  m.vocab_fingerprint = vocab.fingerprint;
  size_t dim = config.embedding_dim;
  m.embedding = Matrix(vocab.size(), dim, 0.0);  // PAD and OOV rows stay zero
  for (size_t i = 0; i < vocab.words.size(); ++i) {
    const auto& vec = table.vectors[table.index.at(vocab.words[i])];
    for (size_t d = 0; d < dim; ++d) m.embedding.at(i + 2, d) = vec[d];
  }
  size_t k = config.kernel_size, f = config.number_filters, u = config.dense_units;
  Rng rng(derive_seed(seed, "cnn-init"));
  auto glorot = [&](std::vector<double>& w, size_t count, size_t fan_in, size_t fan_out) {
    double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    w.resize(count);
    for (double& x : w) x = rng.range(-limit, limit);
  };
  glorot(m.conv_w, k * dim * f, k * dim, k * f);
  m.conv_b.assign(f, 0.0);
  glorot(m.dense_w, f * u, f, u);
  m.dense_b.assign(u, 0.0);
  glorot(m.out_w, u * 2, u, 2);
  m.out_b.assign(2, 0.0);
  return m;
}

namespace {

struct ForwardCache {
  size_t p_real = 0;                // positions whose window touches a real token
  std::vector<double> pooled_pre;   // max conv pre-activation per filter
  std::vector<size_t> argmax;       // winning position per filter
  std::vector<double> pooled;       // tanh of pooled_pre
  std::vector<double> dense_act;
  std::array<double, 2> probs{};
  double loss = 0.0;
};

// Trailing PAD windows all evaluate to the filter bias (zero embedding rows),
// so only windows touching a real token are convolved; the shared PAD value
// enters the max once. Results are bit-identical to the full computation.
void forward_example(const CnnModel& m, std::span<const uint32_t> seq, int label,
                     ForwardCache& cache) {
  const size_t k = m.config.kernel_size, f = m.config.number_filters;
  const size_t u = m.config.dense_units, dim = m.config.embedding_dim;
  if (seq.size() < k) throw InputError("sequence shorter than the convolution kernel");
  for (uint32_t idx : seq)
    if (idx >= m.embedding.rows)
      throw InputError("token index " + std::to_string(idx) + " outside vocabulary range");

  size_t len = seq.size();
  size_t real_len = len;
  while (real_len > 0 && seq[real_len - 1] == VocabIndex::kPad) --real_len;
  size_t p_total = len - k + 1;
  cache.p_real = std::min(real_len, p_total);

  cache.pooled_pre.assign(f, -std::numeric_limits<double>::infinity());
  cache.argmax.assign(f, 0);
  std::vector<double> z(f);
  for (size_t p = 0; p < cache.p_real; ++p) {
    for (size_t j = 0; j < f; ++j) z[j] = m.conv_b[j];
    for (size_t kk = 0; kk < k; ++kk) {
      auto row = m.embedding.row(seq[p + kk]);
      const double* w = m.conv_w.data() + kk * dim * f;
      for (size_t d = 0; d < dim; ++d) {
        double e = row[d];
        if (e == 0.0) continue;
        const double* wd = w + d * f;
        for (size_t j = 0; j < f; ++j) z[j] += wd[j] * e;
      }
    }
    for (size_t j = 0; j < f; ++j) {
      if (z[j] > cache.pooled_pre[j]) {
        cache.pooled_pre[j] = z[j];
        cache.argmax[j] = p;
      }
    }
  }
  if (cache.p_real < p_total) {
    for (size_t j = 0; j < f; ++j) {
      if (m.conv_b[j] > cache.pooled_pre[j]) {
        cache.pooled_pre[j] = m.conv_b[j];
        cache.argmax[j] = cache.p_real;  // first all-PAD window
      }
    }
  }

  cache.pooled.resize(f);
  for (size_t j = 0; j < f; ++j) {
    cache.pooled[j] = std::tanh(cache.pooled_pre[j]);
    assert(cache.pooled[j] >= -1.0 && cache.pooled[j] <= 1.0);
  }

  cache.dense_act.resize(u);
  for (size_t uu = 0; uu < u; ++uu) {
    double acc = m.dense_b[uu];
    for (size_t j = 0; j < f; ++j) acc += cache.pooled[j] * m.dense_w[j * u + uu];
    cache.dense_act[uu] = std::tanh(acc);
  }

  std::array<double, 2> logits{m.out_b[0], m.out_b[1]};
  for (size_t uu = 0; uu < u; ++uu) {
    logits[0] += cache.dense_act[uu] * m.out_w[uu * 2];
    logits[1] += cache.dense_act[uu] * m.out_w[uu * 2 + 1];
  }
  double mx = std::max(logits[0], logits[1]);
  double e0 = std::exp(logits[0] - mx), e1 = std::exp(logits[1] - mx);
  double sum = e0 + e1;
  cache.probs = {e0 / sum, e1 / sum};
  assert(std::abs(cache.probs[0] + cache.probs[1] - 1.0) < 1e-9);
  cache.loss = label >= 0 ? -std::log(std::max(cache.probs[label], 1e-300)) : 0.0;
}

struct Gradients {
  std::vector<double> conv_w, conv_b, dense_w, dense_b, out_w, out_b;

  explicit Gradients(const CnnModel& m)
      : conv_w(m.conv_w.size(), 0.0),
        conv_b(m.conv_b.size(), 0.0),
        dense_w(m.dense_w.size(), 0.0),
        dense_b(m.dense_b.size(), 0.0),
        out_w(m.out_w.size(), 0.0),
        out_b(m.out_b.size(), 0.0) {}

  void scale(double s) {
    for (auto* v : {&conv_w, &conv_b, &dense_w, &dense_b, &out_w, &out_b})
      for (double& x : *v) x *= s;
  }
};

void backward_example(const CnnModel& m, std::span<const uint32_t> seq, int label,
                      const ForwardCache& cache, Gradients& g) {
  const size_t k = m.config.kernel_size, f = m.config.number_filters;
  const size_t u = m.config.dense_units, dim = m.config.embedding_dim;

  std::array<double, 2> dlogits = cache.probs;
  dlogits[label] -= 1.0;
  g.out_b[0] += dlogits[0];
  g.out_b[1] += dlogits[1];
  std::vector<double> ddense(u);
  for (size_t uu = 0; uu < u; ++uu) {
    g.out_w[uu * 2] += cache.dense_act[uu] * dlogits[0];
    g.out_w[uu * 2 + 1] += cache.dense_act[uu] * dlogits[1];
    double dh = m.out_w[uu * 2] * dlogits[0] + m.out_w[uu * 2 + 1] * dlogits[1];
    ddense[uu] = dh * (1.0 - cache.dense_act[uu] * cache.dense_act[uu]);
  }
  std::vector<double> dpooled(f, 0.0);
  for (size_t j = 0; j < f; ++j) {
    for (size_t uu = 0; uu < u; ++uu) {
      g.dense_w[j * u + uu] += cache.pooled[j] * ddense[uu];
      dpooled[j] += m.dense_w[j * u + uu] * ddense[uu];
    }
  }
  for (size_t uu = 0; uu < u; ++uu) g.dense_b[uu] += ddense[uu];

  for (size_t j = 0; j < f; ++j) {
    double dz = dpooled[j] * (1.0 - cache.pooled[j] * cache.pooled[j]);
    g.conv_b[j] += dz;
    size_t p = cache.argmax[j];
    if (p >= cache.p_real) continue;  // all-PAD window: zero inputs
    for (size_t kk = 0; kk < k; ++kk) {
      auto row = m.embedding.row(seq[p + kk]);
      double* gw = g.conv_w.data() + kk * dim * f;
      for (size_t d = 0; d < dim; ++d) {
        double e = row[d];
        if (e != 0.0) gw[d * f + j] += dz * e;
      }
    }
  }
}

struct AdamState {
  std::vector<double> m, v;
  explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

void adam_step(std::vector<double>& w, const std::vector<double>& g, AdamState& st, double lr,
               size_t t) {
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
  for (size_t i = 0; i < w.size(); ++i) {
    st.m[i] = beta1 * st.m[i] + (1.0 - beta1) * g[i];
    st.v[i] = beta2 * st.v[i] + (1.0 - beta2) * g[i] * g[i];
    w[i] -= lr * (st.m[i] / bc1) / (std::sqrt(st.v[i] / bc2) + eps);
  }
}

}  // namespace

std::vector<std::array<double, 2>> cnn_forward(const CnnModel& model,
                                               const std::vector<std::vector<uint32_t>>& batch) {
  std::vector<std::array<double, 2>> out;
  out.reserve(batch.size());
  ForwardCache cache;
  for (const auto& seq : batch) {
    forward_example(model, seq, -1, cache);
    out.push_back(cache.probs);
  }
  return out;
}

CnnTrainHistory cnn_train(CnnModel& model, const std::vector<std::vector<uint32_t>>& x,
                          const std::vector<int>& y, uint64_t seed) {
  if (x.empty()) throw InputError("cnn_train: empty training set");
  if (x.size() != y.size()) throw InputError("cnn_train: example/label count mismatch");
  bool has_pos = false, has_neg = false;
  for (int v : y) {
    if (v == 1)
      has_pos = true;
    else if (v == 0)
      has_neg = true;
    else
      throw InputError("cnn_train: labels must be 0 or 1");
  }
  if (!has_pos || !has_neg) throw InputError("cnn_train: training labels contain a single class");

  const auto& cfg = model.config;
  AdamState st_conv_w(model.conv_w.size()), st_conv_b(model.conv_b.size());
  AdamState st_dense_w(model.dense_w.size()), st_dense_b(model.dense_b.size());
  AdamState st_out_w(model.out_w.size()), st_out_b(model.out_b.size());

  CnnTrainHistory history;
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardCache cache;
  size_t step = 0;
  for (size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(derive_seed(seed, "cnn-epoch/" + std::to_string(epoch)));
    rng.shuffle(order);
    for (size_t start = 0; start < x.size(); start += cfg.batch_size) {
      size_t end = std::min(x.size(), start + cfg.batch_size);
      Gradients grads(model);
      double loss_sum = 0.0;
      for (size_t i = start; i < end; ++i) {
        size_t r = order[i];
        forward_example(model, x[r], y[r], cache);
        loss_sum += cache.loss;
        backward_example(model, x[r], y[r], cache, grads);
      }
      double inv_n = 1.0 / static_cast<double>(end - start);
      grads.scale(inv_n);
      ++step;
      adam_step(model.conv_w, grads.conv_w, st_conv_w, cfg.learning_rate, step);
      adam_step(model.conv_b, grads.conv_b, st_conv_b, cfg.learning_rate, step);
      adam_step(model.dense_w, grads.dense_w, st_dense_w, cfg.learning_rate, step);
      adam_step(model.dense_b, grads.dense_b, st_dense_b, cfg.learning_rate, step);
      adam_step(model.out_w, grads.out_w, st_out_w, cfg.learning_rate, step);
      adam_step(model.out_b, grads.out_b, st_out_b, cfg.learning_rate, step);
      history.batch_loss.push_back(loss_sum * inv_n);
    }
  }
  return history;
}

double gradient_check(const CnnModel& model, const std::vector<uint32_t>& example, int label,
                      double epsilon, size_t samples_per_tensor) {
  ForwardCache cache;
  forward_example(model, example, label, cache);
  Gradients analytic(model);
  backward_example(model, example, label, cache, analytic);

  CnnModel probe = model;
  auto loss_at = [&]() {
    ForwardCache c;
    forward_example(probe, example, label, c);
    return c.loss;
  };

  Rng rng(derive_seed(0xfeedc0deULL, "gradient-check"));
  double max_rel_err = 0.0;
  auto check_tensor = [&](std::vector<double>& w, const std::vector<double>& g) {
    std::vector<size_t> picks;
    if (w.size() <= samples_per_tensor) {
      picks.resize(w.size());
      std::iota(picks.begin(), picks.end(), 0);
    } else {
      for (size_t s = 0; s < samples_per_tensor; ++s)
        picks.push_back(static_cast<size_t>(rng.below(w.size())));
    }
    for (size_t i : picks) {
      double orig = w[i];
      w[i] = orig + epsilon;
      double lp = loss_at();
      w[i] = orig - epsilon;
      double lm = loss_at();
      w[i] = orig;
      double numeric = (lp - lm) / (2.0 * epsilon);
      double denom = std::max({std::abs(g[i]), std::abs(numeric), 1e-8});
      max_rel_err = std::max(max_rel_err, std::abs(g[i] - numeric) / denom);
    }
  };
  check_tensor(probe.conv_w, analytic.conv_w);
  check_tensor(probe.conv_b, analytic.conv_b);
  check_tensor(probe.dense_w, analytic.dense_w);
  check_tensor(probe.dense_b, analytic.dense_b);
  check_tensor(probe.out_w, analytic.out_w);
  check_tensor(probe.out_b, analytic.out_b);
  return max_rel_err;
}

std::vector<double> cnn_predict_proba(const CnnModel& model,
                                      const std::vector<std::vector<uint32_t>>& x) {
  auto probs = cnn_forward(model, x);
  std::vector<double> out(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) out[i] = probs[i][1];
  return out;
}

uint64_t embedding_checksum(const CnnModel& model) {
  return fnv1a64_bytes(model.embedding.data.data(), model.embedding.data.size() * sizeof(double));
}

nlohmann::json CnnModel::to_json() const {
  return nlohmann::json{{"config", config.to_json()},
                        {"embedding_rows", embedding.rows},
                        {"embedding_cols", embedding.cols},
                        {"embedding", embedding.data},
                        {"conv_w", conv_w},
                        {"conv_b", conv_b},
                        {"dense_w", dense_w},
                        {"dense_b", dense_b},
                        {"out_w", out_w},
                        {"out_b", out_b},
                        {"vocab_fingerprint", vocab_fingerprint}};
}

CnnModel CnnModel::from_json(const nlohmann::json& j) {
  CnnModel m;
  m.config = CnnConfig::from_json(j.at("config"));
  m.embedding.rows = j.at("embedding_rows").get<size_t>();
  m.embedding.cols = j.at("embedding_cols").get<size_t>();
  m.embedding.data = j.at("embedding").get<std::vector<double>>();
  if (m.embedding.data.size() != m.embedding.rows * m.embedding.cols)
    throw InputError("corrupt model file: embedding size mismatch");
  m.conv_w = j.at("conv_w").get<std::vector<double>>();
  m.conv_b = j.at("conv_b").get<std::vector<double>>();
  m.dense_w = j.at("dense_w").get<std::vector<double>>();
  m.dense_b = j.at("dense_b").get<std::vector<double>>();
  m.out_w = j.at("out_w").get<std::vector<double>>();
  m.out_b = j.at("out_b").get<std::vector<double>>();
  m.vocab_fingerprint = j.at("vocab_fingerprint").get<uint64_t>();
  return m;
}

}  // namespace feedkit
