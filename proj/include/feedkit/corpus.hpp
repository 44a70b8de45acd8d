#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feedkit/errors.hpp"
#include "feedkit/rng.hpp"

namespace feedkit {

enum class Language { EN, IT };
enum class Source { AppReview, Tweet };
enum class LabelClass { ProblemReport, Inquiry, Irrelevant };

inline constexpr std::array<LabelClass, 3> kLabelClasses = {
    LabelClass::ProblemReport, LabelClass::Inquiry, LabelClass::Irrelevant};

Language parse_language(const std::string& s);
Source parse_source(const std::string& s);
LabelClass parse_label(const std::string& s);
const std::string& to_string(Language l);
const std::string& to_string(Source s);
const std::string& to_string(LabelClass c);
inline size_t label_index(LabelClass c) { return static_cast<size_t>(c); }

// One review or tweet. `label` is empty for unannotated documents.
struct FeedbackDocument {
  std::string id;
  std::string text;
  Language language = Language::EN;
  Source source = Source::AppReview;
  std::optional<LabelClass> label;
};

struct AnnotationRecord {
  std::string doc_id;
  std::string annotator_id;
  LabelClass label;
};

// Immutable after construction; every document carries a label and ids are
// unique. class_counts is maintained alongside documents.
struct LabeledDataset {
  std::vector<FeedbackDocument> documents;
  std::array<size_t, 3> class_counts{};  // indexed by label_index()

  static LabeledDataset from_documents(std::vector<FeedbackDocument> docs);

  size_t size() const { return documents.size(); }
  size_t count(LabelClass c) const { return class_counts[label_index(c)]; }
  // Recomputes counts from scratch; equals class_counts by invariant.
  std::array<size_t, 3> recount() const;
};

struct DataSplit {
  LabeledDataset train;
  LabeledDataset test;
  uint64_t seed = 0;
  double ratio = 0.0;
};

enum class DatasetFormat { Jsonl, Csv };

// Loads a fully labeled dataset. JSONL records look like
//   {"id": "...", "text": "...", "language": "EN", "source": "tweet", "label": "inquiry"}
// CSV requires the exact header id,text,language,source,label.
LabeledDataset load_dataset(const std::string& path, DatasetFormat format);

// Same formats, but records may carry a null/empty label (prediction input).
std::vector<FeedbackDocument> load_documents(const std::string& path, DatasetFormat format);

// Annotation JSONL: {"doc_id": "...", "annotator_id": "...", "label": "..."}
std::vector<AnnotationRecord> load_annotations(const std::string& path);

void save_dataset_jsonl(const std::vector<FeedbackDocument>& docs, const std::string& path);

// Majority vote per document. An entry without a label means the document
// needs adjudication: fewer than two annotations, or no strict majority.
std::map<std::string, std::optional<LabelClass>> aggregate_annotations(
    const std::vector<AnnotationRecord>& annotations);

// Per-class split: each class contributes round(ratio * n) documents to the
// train side (clamped so both sides keep at least one). Deterministic per
// seed; document order is preserved. Classes with fewer than two members are
// rejected.
DataSplit stratified_split(const LabeledDataset& ds, double ratio, uint64_t seed);

// Binary framing (positive vs rest): randomly drops majority-group documents
// until both groups are the size of the original minority. The minority group
// is untouched and no document is ever fabricated.
LabeledDataset undersample_majority(const LabeledDataset& ds, LabelClass positive, uint64_t seed);

// Index-level core shared by undersample_majority and the fold-level sampler
// in the experiment harness: y holds 0/1 per row, returns the kept subset of
// `rows` in original order.
std::vector<size_t> undersample_indices(const std::vector<int>& y,
                                        const std::vector<size_t>& rows, Rng& rng);

}  // namespace feedkit
