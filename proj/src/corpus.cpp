#include "feedkit/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "feedkit/hash.hpp"
#include "json.hpp"

namespace feedkit {

namespace {

const std::string kLangNames[] = {"EN", "IT"};
const std::string kSourceNames[] = {"app_review", "tweet"};
const std::string kLabelNames[] = {"problem_report", "inquiry", "irrelevant"};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Language parse_language(const std::string& s) {
  if (s == "EN") return Language::EN;
  if (s == "IT") return Language::IT;
  throw InputError("unknown language '" + s + "' (expected EN or IT)");
}

Source parse_source(const std::string& s) {
  if (s == "app_review") return Source::AppReview;
  if (s == "tweet") return Source::Tweet;
  throw InputError("unknown source '" + s + "' (expected app_review or tweet)");
}

LabelClass parse_label(const std::string& s) {
  for (LabelClass c : kLabelClasses)
    if (s == kLabelNames[label_index(c)]) return c;
  throw InputError("unknown label '" + s +
                   "' (expected problem_report, inquiry or irrelevant)");
}

const std::string& to_string(Language l) { return kLangNames[static_cast<size_t>(l)]; }
const std::string& to_string(Source s) { return kSourceNames[static_cast<size_t>(s)]; }
const std::string& to_string(LabelClass c) { return kLabelNames[label_index(c)]; }

LabeledDataset LabeledDataset::from_documents(std::vector<FeedbackDocument> docs) {
  if (docs.empty()) throw InputError("empty dataset");
  LabeledDataset ds;
  std::unordered_set<std::string> seen;
  for (const auto& d : docs) {
    if (!d.label) throw InputError("document '" + d.id + "' has no label");
    if (trim(d.text).empty()) throw InputError("document '" + d.id + "' has empty text");
    if (!seen.insert(d.id).second) throw InputError("duplicate document id '" + d.id + "'");
    ds.class_counts[label_index(*d.label)]++;
  }
  ds.documents = std::move(docs);
  return ds;
}

std::array<size_t, 3> LabeledDataset::recount() const {
  std::array<size_t, 3> counts{};
  for (const auto& d : documents) counts[label_index(*d.label)]++;
  return counts;
}

namespace {

FeedbackDocument doc_from_fields(const std::string& id, const std::string& text,
                                 const std::string& language, const std::string& source,
                                 const std::string& label, bool label_required,
                                 const std::string& where) {
  FeedbackDocument d;
  try {
    d.id = id;
    d.text = text;
    d.language = parse_language(language);
    d.source = parse_source(source);
    if (!label.empty())
      d.label = parse_label(label);
    else if (label_required)
      throw InputError("missing label");
    if (d.id.empty()) throw InputError("missing id");
    if (trim(d.text).empty()) throw InputError("empty text");
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
  return d;
}

std::vector<FeedbackDocument> parse_jsonl_documents(const std::string& path,
                                                    bool label_required) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<FeedbackDocument> docs;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": parse error: " + e.what());
    }
    if (!j.is_object()) throw InputError(where + ": expected a JSON object");
    auto str_field = [&](const char* key, bool required) -> std::string {
      if (!j.contains(key) || j[key].is_null()) {
        if (required) throw InputError(where + ": missing field '" + key + "'");
        return "";
      }
      if (!j[key].is_string()) throw InputError(where + ": field '" + key + "' must be a string");
      return j[key].get<std::string>();
    };
    docs.push_back(doc_from_fields(str_field("id", true), str_field("text", true),
                                   str_field("language", true), str_field("source", true),
                                   str_field("label", false), label_required, where));
  }
  return docs;
}

// RFC-4180 style records: quoted fields may contain commas, quotes ("") and
// newlines. Returns records with the 1-based line each record starts on.
std::vector<std::pair<size_t, std::vector<std::string>>> parse_csv(const std::string& content) {
  std::vector<std::pair<size_t, std::vector<std::string>>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  size_t line = 1, record_line = 1;
  bool field_started = false, record_started = false;
  auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.emplace_back(record_line, record);
    record.clear();
    record_started = false;
  };
  for (size_t i = 0; i < content.size(); ++i) {
    char c = content[i];
    if (!record_started && c != '\n' && c != '\r') {
      record_started = true;
      record_line = line;
    }
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
    } else if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      ++line;
      if (record_started || !record.empty() || !field.empty()) end_record();
    } else if (c == '\r') {
      // swallowed; \r\n handled by the \n branch
    } else {
      field_started = true;
      field += c;
    }
  }
  if (record_started || !record.empty() || !field.empty()) end_record();
  return records;
}

std::vector<FeedbackDocument> parse_csv_documents(const std::string& path, bool label_required) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto records = parse_csv(ss.str());
  if (records.empty()) throw InputError(path + ": empty dataset");
  const std::vector<std::string> header = {"id", "text", "language", "source", "label"};
  if (records.front().second != header)
    throw InputError(path + ":1: expected header id,text,language,source,label");
  std::vector<FeedbackDocument> docs;
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& [lineno, fields] = records[r];
    std::string where = path + ":" + std::to_string(lineno);
    if (fields.size() != 5)
      throw InputError(where + ": expected 5 fields, got " + std::to_string(fields.size()));
    docs.push_back(doc_from_fields(fields[0], fields[1], fields[2], fields[3], fields[4],
                                   label_required, where));
  }
  return docs;
}

void check_unique_ids(const std::vector<FeedbackDocument>& docs, const std::string& path) {
  std::unordered_set<std::string> seen;
  for (const auto& d : docs)
    if (!seen.insert(d.id).second)
      throw InputError(path + ": duplicate document id '" + d.id + "'");
}

}  // namespace

LabeledDataset load_dataset(const std::string& path, DatasetFormat format) {
  auto docs = format == DatasetFormat::Jsonl ? parse_jsonl_documents(path, true)
                                             : parse_csv_documents(path, true);
  if (docs.empty()) throw InputError(path + ": empty dataset");
  check_unique_ids(docs, path);
  return LabeledDataset::from_documents(std::move(docs));
}

std::vector<FeedbackDocument> load_documents(const std::string& path, DatasetFormat format) {
  auto docs = format == DatasetFormat::Jsonl ? parse_jsonl_documents(path, false)
                                             : parse_csv_documents(path, false);
  check_unique_ids(docs, path);
  return docs;
}

std::vector<AnnotationRecord> load_annotations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::vector<AnnotationRecord> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    try {
      auto j = nlohmann::json::parse(line);
      AnnotationRecord a;
      a.doc_id = j.at("doc_id").get<std::string>();
      a.annotator_id = j.at("annotator_id").get<std::string>();
      a.label = parse_label(j.at("label").get<std::string>());
      if (a.doc_id.empty() || a.annotator_id.empty())
        throw InputError("empty doc_id or annotator_id");
      out.push_back(std::move(a));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": parse error: " + e.what());
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return out;
}

void save_dataset_jsonl(const std::vector<FeedbackDocument>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  for (const auto& d : docs) {
    nlohmann::json j{{"id", d.id},
                     {"text", d.text},
                     {"language", to_string(d.language)},
                     {"source", to_string(d.source)}};
    if (d.label)
      j["label"] = to_string(*d.label);
    else
      j["label"] = nullptr;
    out << j.dump() << "\n";
  }
}

std::map<std::string, std::optional<LabelClass>> aggregate_annotations(
    const std::vector<AnnotationRecord>& annotations) {
  std::map<std::string, std::vector<LabelClass>> votes;
  std::set<std::pair<std::string, std::string>> pairs;
  for (const auto& a : annotations) {
    if (!pairs.insert({a.doc_id, a.annotator_id}).second)
      throw InputError("duplicate annotation for doc '" + a.doc_id + "' by annotator '" +
                       a.annotator_id + "'");
    votes[a.doc_id].push_back(a.label);
  }
  std::map<std::string, std::optional<LabelClass>> result;
  for (const auto& [doc_id, labels] : votes) {
    std::array<size_t, 3> counts{};
    for (LabelClass l : labels) counts[label_index(l)]++;
    size_t best = 0;
    for (size_t i = 1; i < 3; ++i)
      if (counts[i] > counts[best]) best = i;
    // Assign only with >= 2 annotations and a strict majority.
    if (labels.size() >= 2 && counts[best] * 2 > labels.size())
      result[doc_id] = static_cast<LabelClass>(best);
    else
      result[doc_id] = std::nullopt;
  }
  return result;
}

DataSplit stratified_split(const LabeledDataset& ds, double ratio, uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw InputError("split ratio must be in (0,1), got " + std::to_string(ratio));
  std::array<std::vector<size_t>, 3> by_class;
  for (size_t i = 0; i < ds.documents.size(); ++i)
    by_class[label_index(*ds.documents[i].label)].push_back(i);
  std::vector<bool> in_train(ds.documents.size(), false);
  for (LabelClass c : kLabelClasses) {
    auto& members = by_class[label_index(c)];
    if (members.empty()) continue;
    if (members.size() < 2)
      throw InputError("class '" + to_string(c) + "' has fewer than 2 documents; cannot split");
    size_t n = members.size();
    auto want = static_cast<size_t>(std::llround(ratio * static_cast<double>(n)));
    size_t n_train = std::clamp<size_t>(want, 1, n - 1);
    Rng rng(derive_seed(seed, "split/" + to_string(c)));
    rng.shuffle(members);
    for (size_t i = 0; i < n_train; ++i) in_train[members[i]] = true;
  }
  std::vector<FeedbackDocument> train, test;
  for (size_t i = 0; i < ds.documents.size(); ++i)
    (in_train[i] ? train : test).push_back(ds.documents[i]);
  DataSplit split;
  split.train = LabeledDataset::from_documents(std::move(train));
  split.test = LabeledDataset::from_documents(std::move(test));
  split.seed = seed;
  split.ratio = ratio;
  // Partition check on every split: disjoint by id, union covers the input.
  std::unordered_set<std::string> seen;
  for (const auto& d : split.train.documents) seen.insert(d.id);
  for (const auto& d : split.test.documents)
    if (!seen.insert(d.id).second)
      throw Error("split invariant violated: document '" + d.id + "' in both sides");
  if (seen.size() != ds.documents.size())
    throw Error("split invariant violated: train/test union does not cover the dataset");
  return split;
}

std::vector<size_t> undersample_indices(const std::vector<int>& y,
                                        const std::vector<size_t>& rows, Rng& rng) {
  std::vector<size_t> pos, neg;
  for (size_t r : rows) (y[r] ? pos : neg).push_back(r);
  if (pos.empty() || neg.empty())
    throw InputError("undersampling requires both groups to be non-empty");
  auto& majority = pos.size() >= neg.size() ? pos : neg;
  const auto& minority = pos.size() >= neg.size() ? neg : pos;
  if (majority.size() == minority.size()) return rows;
  rng.shuffle(majority);
  majority.resize(minority.size());
  std::vector<size_t> kept;
  kept.reserve(2 * minority.size());
  std::unordered_set<size_t> keep_set(majority.begin(), majority.end());
  for (size_t r : minority) keep_set.insert(r);
  for (size_t r : rows)
    if (keep_set.count(r)) kept.push_back(r);
  return kept;
}

LabeledDataset undersample_majority(const LabeledDataset& ds, LabelClass positive,
                                    uint64_t seed) {
  std::vector<int> y(ds.documents.size());
  std::vector<size_t> rows(ds.documents.size());
  for (size_t i = 0; i < ds.documents.size(); ++i) {
    y[i] = *ds.documents[i].label == positive ? 1 : 0;
    rows[i] = i;
  }
  Rng rng(derive_seed(seed, "undersample"));
  auto kept = undersample_indices(y, rows, rng);
  std::vector<FeedbackDocument> docs;
  docs.reserve(kept.size());
  for (size_t r : kept) docs.push_back(ds.documents[r]);
  return LabeledDataset::from_documents(std::move(docs));
}

std::string hex64(uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  uint64_t h = kFnvOffset64;
  char buf[1 << 14];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
    h = fnv1a64_bytes(buf, static_cast<size_t>(in.gcount()), h);
  return h;
}

}  // namespace feedkit
