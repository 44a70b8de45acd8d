#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "feedkit/corpus.hpp"
#include "feedkit/embeddings.hpp"
#include "feedkit/experiments.hpp"
#include "feedkit/hash.hpp"
#include "feedkit/manifest.hpp"
#include "feedkit/pipeline.hpp"
#include "feedkit/presets.hpp"
#include "feedkit/runconfig.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace feedkit;

namespace {

constexpr const char* kVersion = "feedkit 1.0.0";

DatasetFormat format_from_path(const std::string& path, const std::string& explicit_format) {
  if (explicit_format == "jsonl") return DatasetFormat::Jsonl;
  if (explicit_format == "csv") return DatasetFormat::Csv;
  if (!explicit_format.empty())
    throw InputError("unknown format '" + explicit_format + "' (expected jsonl or csv)");
  return fs::path(path).extension() == ".csv" ? DatasetFormat::Csv : DatasetFormat::Jsonl;
}

RunManifest base_manifest(const std::string& command, int argc, char** argv, uint64_t seed,
                          size_t jobs, const std::string& out_dir) {
  RunManifest m;
  m.command = command;
  for (int i = 0; i < argc; ++i) m.argv.emplace_back(argv[i]);
  m.seed = seed;
  m.jobs = jobs;
  m.out_dir = out_dir;
  m.tool_version = kVersion;
  return m;
}

struct AggregateArgs {
  std::string annotations_path;
  std::string docs_path;
  std::string out_path;
  std::string format;
};

int cmd_aggregate(const AggregateArgs& args, int argc, char** argv) {
  auto annotations = load_annotations(args.annotations_path);
  auto docs = load_documents(args.docs_path, format_from_path(args.docs_path, args.format));
  auto resolved = aggregate_annotations(annotations);

  std::vector<FeedbackDocument> labeled;
  std::vector<std::string> needs_adjudication;
  for (auto& d : docs) {
    auto it = resolved.find(d.id);
    if (it == resolved.end()) continue;  // document without annotations
    if (it->second) {
      d.label = *it->second;
      labeled.push_back(d);
    } else {
      needs_adjudication.push_back(d.id);
    }
  }
  for (const auto& [doc_id, label] : resolved)
    if (!label && std::find(needs_adjudication.begin(), needs_adjudication.end(), doc_id) ==
                      needs_adjudication.end() &&
        std::none_of(docs.begin(), docs.end(),
                     [&](const FeedbackDocument& d) { return d.id == doc_id; }))
      needs_adjudication.push_back(doc_id);

  save_dataset_jsonl(labeled, args.out_path);
  RunManifest m = base_manifest("aggregate", argc, argv, 0, 1,
                                fs::path(args.out_path).parent_path().string());
  m.add_input(args.annotations_path);
  m.add_input(args.docs_path);
  m.outputs.push_back(args.out_path);
  write_manifest(m, args.out_path + ".manifest.json");

  if (!needs_adjudication.empty()) {
    std::cerr << "needs adjudication (" << needs_adjudication.size() << " documents):\n";
    for (const auto& id : needs_adjudication) std::cerr << "  " << id << "\n";
    return 2;
  }
  std::cout << "wrote " << labeled.size() << " labeled documents to " << args.out_path << "\n";
  return 0;
}

struct BenchmarkArgs {
  std::string config_path;
  std::string out_dir = "benchmark-out";
  uint64_t seed = 42;
  size_t jobs = 1;
};

int cmd_benchmark(const BenchmarkArgs& args, int argc, char** argv) {
  RunConfigFile cfg = parse_benchmark_config(args.config_path);
  cfg.benchmark.seed = args.seed;
  cfg.benchmark.jobs = args.jobs;

  std::vector<Language> langs;
  for (const auto& ds : cfg.benchmark.datasets)
    for (const auto& d : ds.data.documents)
      if (std::find(langs.begin(), langs.end(), d.language) == langs.end())
        langs.push_back(d.language);
  Resources res = Resources::load(cfg.data_dir, langs);
  for (const auto& [lang, path] : cfg.embedding_paths)
    res.embeddings[lang] = load_embeddings(path, cfg.embedding_dim);

  fs::create_directories(args.out_dir);
  auto output = run_benchmark(cfg.benchmark, res);
  write_results(output, args.out_dir);

  RunManifest m = base_manifest("benchmark", argc, argv, args.seed, args.jobs, args.out_dir);
  m.add_input(args.config_path);
  for (const auto& p : cfg.dataset_paths) m.add_input(p);
  for (const auto& [lang, path] : cfg.embedding_paths) m.add_input(path);
  m.outputs = {args.out_dir + "/results.csv", args.out_dir + "/results.json"};
  write_manifest(m, args.out_dir + "/manifest.json");

  std::cout << results_csv(output.results);
  return 0;
}

struct TrainArgs {
  std::string preset_name;
  std::string config_path;
  std::string data_path;
  std::string format;
  std::string out_path = "model.json";
  std::string data_dir = "data";
  std::string embeddings_path;
  size_t embedding_dim = 300;
  uint64_t seed = 42;
};

// Training specification shared by presets and train-config files.
struct TrainSpec {
  std::string label;
  Approach approach = Approach::Traditional;
  Language language = Language::EN;
  LabelClass positive = LabelClass::ProblemReport;
  bool sampling = false;
  bool scaling = false;
  std::vector<FeatureGroup> features;
  ClassifierConfig classifier;
  CnnConfig cnn;
  TfidfOptions tfidf;
};

TrainSpec spec_from_preset(const Preset& preset) {
  TrainSpec spec;
  spec.label = preset.name;
  spec.approach = preset.approach;
  spec.language = preset.language;
  spec.positive = preset.positive;
  spec.sampling = preset.sampling;
  spec.scaling = preset.scaling;
  spec.features = preset.features.groups;
  spec.classifier = preset.classifier;
  spec.cnn.number_filters = preset.number_filters;
  spec.cnn.kernel_size = preset.kernel_size;
  spec.cnn.dense_units = preset.dense_units;
  return spec;
}

TrainSpec spec_from_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": invalid JSON: " + e.what());
  }
  TrainSpec spec;
  spec.label = path;
  spec.approach = parse_approach(j.at("approach").get<std::string>());
  if (j.contains("language")) spec.language = parse_language(j["language"].get<std::string>());
  spec.positive = parse_label(j.at("positive").get<std::string>());
  if (j.contains("sampling")) spec.sampling = j["sampling"].get<bool>();
  if (j.contains("scaling")) spec.scaling = j["scaling"].get<bool>();
  if (j.contains("tfidf")) {
    if (j["tfidf"].contains("min_df")) spec.tfidf.min_df = j["tfidf"]["min_df"].get<size_t>();
    if (j["tfidf"].contains("max_df")) spec.tfidf.max_df = j["tfidf"]["max_df"].get<double>();
  }
  if (spec.approach == Approach::Traditional) {
    for (const auto& g : j.at("features"))
      spec.features.push_back(parse_feature_group(g.get<std::string>()));
    auto expanded = expand_algorithm_grid(j.at("algorithm"));
    if (expanded.size() != 1)
      throw InputError(path + ": config key 'algorithm' must pin exactly one configuration, got " +
                       std::to_string(expanded.size()));
    spec.classifier = expanded.front();
  } else {
    const auto& c = j.at("cnn");
    if (c.contains("number_filters")) spec.cnn.number_filters = c["number_filters"].get<size_t>();
    if (c.contains("kernel_size")) spec.cnn.kernel_size = c["kernel_size"].get<size_t>();
    if (c.contains("dense_units")) spec.cnn.dense_units = c["dense_units"].get<size_t>();
    if (c.contains("input_length")) spec.cnn.input_length = c["input_length"].get<size_t>();
    if (c.contains("epochs")) spec.cnn.epochs = c["epochs"].get<size_t>();
    if (c.contains("batch_size")) spec.cnn.batch_size = c["batch_size"].get<size_t>();
    if (c.contains("learning_rate")) spec.cnn.learning_rate = c["learning_rate"].get<double>();
  }
  return spec;
}

int cmd_train(const TrainArgs& args, int argc, char** argv) {
  if (args.preset_name.empty() == args.config_path.empty())
    throw InputError("train needs exactly one of --preset or --config");
  TrainSpec spec = args.preset_name.empty() ? spec_from_config(args.config_path)
                                            : spec_from_preset(load_preset(args.preset_name));
  LabeledDataset train = load_dataset(args.data_path, format_from_path(args.data_path, args.format));
  Resources res = Resources::load(args.data_dir, {spec.language});

  bool needs_embeddings =
      spec.approach == Approach::Deep ||
      std::find(spec.features.begin(), spec.features.end(), FeatureGroup::FastText) !=
          spec.features.end();
  if (needs_embeddings) {
    if (args.embeddings_path.empty())
      throw InputError("'" + spec.label + "' needs --embeddings <word-vector file>");
    res.embeddings[spec.language] = load_embeddings(args.embeddings_path, args.embedding_dim);
  }

  std::string loss_csv_path;
  if (spec.approach == Approach::Traditional) {
    auto model = fit_traditional_model(train, spec.positive, spec.features, spec.classifier,
                                       spec.sampling, spec.scaling, res, spec.tfidf, args.seed);
    save_model(model, args.out_path);
  } else {
    CnnConfig cfg = spec.cnn;
    cfg.embedding_dim = res.embeddings_for(spec.language).dimension;
    DeepModel model = fit_deep_model(train, spec.positive, cfg, spec.sampling, res, args.seed);
    model.scaling = spec.scaling;
    save_model(model, args.out_path);
    loss_csv_path = args.out_path + ".loss.csv";
    std::ofstream loss(loss_csv_path, std::ios::binary);
    if (!loss) throw InputError("cannot write " + loss_csv_path);
    loss << "batch,loss\n";
    char buf[64];
    for (size_t i = 0; i < model.loss_history.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%zu,%.12g\n", i, model.loss_history[i]);
      loss << buf;
    }
  }

  RunManifest m = base_manifest("train", argc, argv, args.seed, 1,
                                fs::path(args.out_path).parent_path().string());
  m.add_input(args.data_path);
  if (needs_embeddings) m.add_input(args.embeddings_path);
  m.outputs.push_back(args.out_path);
  if (!loss_csv_path.empty()) m.outputs.push_back(loss_csv_path);
  write_manifest(m, args.out_path + ".manifest.json");
  std::cout << "wrote model for " << spec.label << " to " << args.out_path << "\n";
  return 0;
}

struct PredictArgs {
  std::string model_path;
  std::string input_path;
  std::string format;
  std::string out_path = "predictions.jsonl";
  std::string data_dir = "data";
};

int cmd_predict(const PredictArgs& args, int argc, char** argv) {
  LoadedModel model = load_model(args.model_path);
  auto docs = load_documents(args.input_path, format_from_path(args.input_path, args.format));
  Resources res = Resources::load(args.data_dir, {model.language()});
  auto scores = predict_with_model(model, docs, res);

  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw InputError("cannot write " + args.out_path);
  const std::string positive_name = to_string(model.positive());
  for (size_t i = 0; i < docs.size(); ++i) {
    nlohmann::json j{{"id", docs[i].id},
                     {"positive_probability", scores[i]},
                     {"predicted_label", scores[i] >= 0.5 ? positive_name : "other"}};
    out << j.dump() << "\n";
  }
  out.close();

  RunManifest m = base_manifest("predict", argc, argv, 0, 1,
                                fs::path(args.out_path).parent_path().string());
  m.add_input(args.model_path);
  m.add_input(args.input_path);
  m.outputs.push_back(args.out_path);
  write_manifest(m, args.out_path + ".manifest.json");
  std::cout << "wrote " << docs.size() << " predictions to " << args.out_path << "\n";
  return 0;
}

struct EmbedTrainArgs {
  std::string corpus_path;
  std::string format;
  std::string out_path = "vectors.txt";
  std::string data_dir = "data";
  std::string language = "EN";
  size_t dimension = 300;
  size_t window = 5;
  size_t negatives = 5;
  size_t epochs = 5;
  size_t min_count = 1;
  double learning_rate = 0.025;
  size_t buckets = 2000;
  bool no_subwords = false;
  uint64_t seed = 42;
};

int cmd_embed_train(const EmbedTrainArgs& args, int argc, char** argv) {
  Language lang = parse_language(args.language);
  Resources res = Resources::load(args.data_dir, {lang});
  std::vector<ProcessedText> corpus;
  if (args.format == "txt") {
    std::ifstream in(args.corpus_path);
    if (!in) throw InputError("cannot open " + args.corpus_path);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) corpus.push_back(process(line, lang, res.lexicons_for(lang)));
  } else {
    auto docs =
        load_documents(args.corpus_path, format_from_path(args.corpus_path, args.format));
    for (const auto& d : docs) corpus.push_back(process(d.text, lang, res.lexicons_for(lang)));
  }

  SkipgramConfig cfg;
  cfg.dimension = args.dimension;
  cfg.window = args.window;
  cfg.negatives = args.negatives;
  cfg.epochs = args.epochs;
  cfg.min_count = args.min_count;
  cfg.learning_rate = args.learning_rate;
  cfg.bucket_count = args.buckets;
  cfg.subwords = !args.no_subwords;
  auto result = train_skipgram(corpus, cfg, args.seed);
  result.table.language = lang;
  save_embeddings(result.table, args.out_path);

  RunManifest m = base_manifest("embed-train", argc, argv, args.seed, 1,
                                fs::path(args.out_path).parent_path().string());
  m.add_input(args.corpus_path);
  m.outputs.push_back(args.out_path);
  write_manifest(m, args.out_path + ".manifest.json");

  std::cout << "trained " << result.table.words.size() << " word vectors (dim " << cfg.dimension
            << "); final epoch loss " << result.epoch_loss.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feedkit: multilingual user-feedback classification toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  AggregateArgs agg;
  auto* aggregate = app.add_subcommand(
      "aggregate", "Aggregate annotation votes into a labeled dataset (majority rule)");
  aggregate->add_option("--annotations", agg.annotations_path, "Annotation JSONL file")
      ->required();
  aggregate->add_option("--docs", agg.docs_path, "Unlabeled documents (JSONL or CSV)")->required();
  aggregate->add_option("--out", agg.out_path, "Output labeled dataset (JSONL)")->required();
  aggregate->add_option("--format", agg.format, "Input format override: jsonl or csv");

  BenchmarkArgs bench;
  auto* benchmark = app.add_subcommand(
      "benchmark", "Run the full experiment grid for both approaches and emit report files");
  benchmark->add_option("--config", bench.config_path, "Benchmark config JSON")->required();
  benchmark->add_option("--out-dir", bench.out_dir, "Output directory");
  benchmark->add_option("--seed", bench.seed, "Global seed (default 42)");
  benchmark->add_option("--jobs", bench.jobs, "Worker pool size for grid cells");

  TrainArgs train;
  auto* train_cmd =
      app.add_subcommand("train", "Train a model from a shipped preset or a train config");
  train_cmd->add_option("--preset", train.preset_name, "Preset name, e.g. trad/tweet_IT/inquiry");
  train_cmd->add_option("--config", train.config_path, "Train config JSON (alternative to --preset)");
  train_cmd->add_option("--data", train.data_path, "Labeled dataset (JSONL or CSV)")->required();
  train_cmd->add_option("--format", train.format, "Input format override");
  train_cmd->add_option("--out", train.out_path, "Output model file");
  train_cmd->add_option("--data-dir", train.data_dir, "Lexicon directory (default: data)");
  train_cmd->add_option("--embeddings", train.embeddings_path, "Word-vector file");
  train_cmd->add_option("--embedding-dim", train.embedding_dim, "Expected vector dimension");
  train_cmd->add_option("--seed", train.seed, "Seed (default 42)");

  PredictArgs pred;
  auto* predict_cmd = app.add_subcommand("predict", "Score documents with a trained model");
  predict_cmd->add_option("--model", pred.model_path, "Model file from 'train'")->required();
  predict_cmd->add_option("--input", pred.input_path, "Documents to score (JSONL or CSV)")
      ->required();
  predict_cmd->add_option("--format", pred.format, "Input format override");
  predict_cmd->add_option("--out", pred.out_path, "Output predictions JSONL");
  predict_cmd->add_option("--data-dir", pred.data_dir, "Lexicon directory (default: data)");

  EmbedTrainArgs embed;
  auto* embed_cmd =
      app.add_subcommand("embed-train", "Train word vectors with skip-gram negative sampling");
  embed_cmd->add_option("--corpus", embed.corpus_path, "Corpus: JSONL docs or plain text lines")
      ->required();
  embed_cmd->add_option("--format", embed.format, "Corpus format: jsonl, csv or txt");
  embed_cmd->add_option("--out", embed.out_path, "Output word-vector text file");
  embed_cmd->add_option("--data-dir", embed.data_dir, "Lexicon directory (default: data)");
  embed_cmd->add_option("--language", embed.language, "EN or IT (default EN)");
  embed_cmd->add_option("--dim", embed.dimension, "Vector dimension (default 300)");
  embed_cmd->add_option("--window", embed.window, "Context window (default 5)");
  embed_cmd->add_option("--negatives", embed.negatives, "Negative samples (default 5)");
  embed_cmd->add_option("--epochs", embed.epochs, "Epochs (default 5)");
  embed_cmd->add_option("--min-count", embed.min_count, "Minimum word count (default 1)");
  embed_cmd->add_option("--lr", embed.learning_rate, "Initial learning rate");
  embed_cmd->add_option("--buckets", embed.buckets, "Subword hash buckets (default 2000)");
  embed_cmd->add_flag("--no-subwords", embed.no_subwords, "Disable subword n-gram vectors");
  embed_cmd->add_option("--seed", embed.seed, "Seed (default 42)");

  try {
    app.parse(argc, argv);
    if (aggregate->parsed()) return cmd_aggregate(agg, argc, argv);
    if (benchmark->parsed()) return cmd_benchmark(bench, argc, argv);
    if (train_cmd->parsed()) return cmd_train(train, argc, argv);
    if (predict_cmd->parsed()) return cmd_predict(pred, argc, argv);
    if (embed_cmd->parsed()) return cmd_embed_train(embed, argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
