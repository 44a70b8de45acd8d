#include <algorithm>
#include <set>

#include "doctest.h"
#include "feedkit/corpus.hpp"
#include "feedkit/hash.hpp"
#include "feedkit/rng.hpp"
#include "testutil.hpp"

using namespace feedkit;

namespace {

FeedbackDocument doc(const std::string& id, LabelClass label, Language lang = Language::EN) {
  FeedbackDocument d;
  d.id = id;
  d.text = "text of " + id;
  d.language = lang;
  d.source = Source::Tweet;
  d.label = label;
  return d;
}

LabeledDataset synthetic_dataset(size_t n_irrelevant, size_t n_problem) {
  std::vector<FeedbackDocument> docs;
  for (size_t i = 0; i < n_irrelevant; ++i)
    docs.push_back(doc("irr" + std::to_string(i), LabelClass::Irrelevant));
  for (size_t i = 0; i < n_problem; ++i)
    docs.push_back(doc("pr" + std::to_string(i), LabelClass::ProblemReport));
  return LabeledDataset::from_documents(std::move(docs));
}

std::set<std::string> ids_of(const LabeledDataset& ds) {
  std::set<std::string> ids;
  for (const auto& d : ds.documents) ids.insert(d.id);
  return ids;
}

}  // namespace

TEST_CASE("load_dataset parses a small JSONL file with correct class counts") {
  testutil::TempDir tmp("corpus-jsonl");
  testutil::write_file(
      tmp.file("ds.jsonl"),
      R"({"id": "a", "text": "app crashes", "language": "EN", "source": "app_review", "label": "problem_report"})"
      "\n"
      R"({"id": "b", "text": "please add dark mode", "language": "EN", "source": "app_review", "label": "inquiry"})"
      "\n"
      R"({"id": "c", "text": "love it", "language": "EN", "source": "app_review", "label": "irrelevant"})"
      "\n");
  auto ds = load_dataset(tmp.file("ds.jsonl"), DatasetFormat::Jsonl);
  CHECK(ds.size() == 3);
  CHECK(ds.count(LabelClass::ProblemReport) == 1);
  CHECK(ds.count(LabelClass::Inquiry) == 1);
  CHECK(ds.count(LabelClass::Irrelevant) == 1);
  CHECK(ds.recount() == ds.class_counts);
}

TEST_CASE("load_dataset rejects duplicate ids naming the id") {
  testutil::TempDir tmp("corpus-dup");
  testutil::write_file(
      tmp.file("ds.jsonl"),
      R"({"id": "a", "text": "x", "language": "EN", "source": "tweet", "label": "inquiry"})"
      "\n"
      R"({"id": "a", "text": "y", "language": "EN", "source": "tweet", "label": "inquiry"})"
      "\n");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ds.jsonl"), DatasetFormat::Jsonl),
                       doctest::Contains("'a'"), InputError);
}

TEST_CASE("load_dataset rejects an empty file") {
  testutil::TempDir tmp("corpus-empty");
  testutil::write_file(tmp.file("ds.jsonl"), "");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ds.jsonl"), DatasetFormat::Jsonl),
                       doctest::Contains("empty"), InputError);
}

TEST_CASE("load_dataset reports parse errors with line numbers") {
  testutil::TempDir tmp("corpus-badline");
  testutil::write_file(
      tmp.file("ds.jsonl"),
      R"({"id": "a", "text": "x", "language": "EN", "source": "tweet", "label": "inquiry"})"
      "\nnot json\n");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ds.jsonl"), DatasetFormat::Jsonl),
                       doctest::Contains(":2"), InputError);
}

TEST_CASE("load_dataset rejects unknown enum values") {
  testutil::TempDir tmp("corpus-badenum");
  testutil::write_file(
      tmp.file("ds.jsonl"),
      R"({"id": "a", "text": "x", "language": "EN", "source": "tweet", "label": "spam"})"
      "\n");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ds.jsonl"), DatasetFormat::Jsonl),
                       doctest::Contains("spam"), InputError);
}

TEST_CASE("load_dataset parses CSV with quoted fields") {
  testutil::TempDir tmp("corpus-csv");
  testutil::write_file(tmp.file("ds.csv"),
                       "id,text,language,source,label\n"
                       "a,\"crashes, then restarts\",EN,app_review,problem_report\n"
                       "b,\"multi\nline tweet\",EN,tweet,irrelevant\n"
                       "c,\"she said \"\"broken\"\" twice\",EN,tweet,problem_report\n");
  auto ds = load_dataset(tmp.file("ds.csv"), DatasetFormat::Csv);
  CHECK(ds.size() == 3);
  CHECK(ds.documents[0].text == "crashes, then restarts");
  CHECK(ds.documents[1].text == "multi\nline tweet");
  CHECK(ds.documents[2].text == "she said \"broken\" twice");
}

TEST_CASE("CSV errors carry the record's starting line number") {
  testutil::TempDir tmp("corpus-csvline");
  testutil::write_file(tmp.file("ds.csv"),
                       "id,text,language,source,label\n"
                       "a,ok,EN,tweet,irrelevant\n"
                       "b,bad,EN,tweet,spam\n");
  CHECK_THROWS_WITH_AS(load_dataset(tmp.file("ds.csv"), DatasetFormat::Csv),
                       doctest::Contains(":3"), InputError);
}

TEST_CASE("aggregate_annotations follows the majority rules") {
  auto l = [](const std::string& d, const std::string& a, LabelClass c) {
    return AnnotationRecord{d, a, c};
  };
  SUBCASE("unanimous pair") {
    auto r = aggregate_annotations(
        {l("d", "A", LabelClass::ProblemReport), l("d", "B", LabelClass::ProblemReport)});
    REQUIRE(r.at("d").has_value());
    CHECK(*r.at("d") == LabelClass::ProblemReport);
  }
  SUBCASE("two-way disagreement needs adjudication") {
    auto r = aggregate_annotations(
        {l("d", "A", LabelClass::ProblemReport), l("d", "B", LabelClass::Inquiry)});
    CHECK_FALSE(r.at("d").has_value());
  }
  SUBCASE("2-of-3 majority wins") {
    auto r = aggregate_annotations({l("d", "A", LabelClass::ProblemReport),
                                    l("d", "B", LabelClass::Inquiry),
                                    l("d", "C", LabelClass::Inquiry)});
    REQUIRE(r.at("d").has_value());
    CHECK(*r.at("d") == LabelClass::Inquiry);
  }
  SUBCASE("single annotation needs adjudication") {
    auto r = aggregate_annotations({l("d", "A", LabelClass::Irrelevant)});
    CHECK_FALSE(r.at("d").has_value());
  }
  SUBCASE("3-way tie among 3 annotators needs adjudication") {
    auto r = aggregate_annotations({l("d", "A", LabelClass::ProblemReport),
                                    l("d", "B", LabelClass::Inquiry),
                                    l("d", "C", LabelClass::Irrelevant)});
    CHECK_FALSE(r.at("d").has_value());
  }
  SUBCASE("empty input yields an empty map") {
    CHECK(aggregate_annotations({}).empty());
  }
  SUBCASE("duplicate (doc, annotator) pair is rejected") {
    CHECK_THROWS_AS(aggregate_annotations({l("d", "A", LabelClass::Inquiry),
                                           l("d", "A", LabelClass::Inquiry)}),
                    InputError);
  }
}

TEST_CASE("aggregate_annotations is permutation-invariant") {
  std::vector<AnnotationRecord> records;
  Rng rng(7);
  for (int d = 0; d < 20; ++d)
    for (int a = 0; a < 1 + static_cast<int>(rng.below(4)); ++a)
      records.push_back({"doc" + std::to_string(d), "ann" + std::to_string(a),
                         static_cast<LabelClass>(rng.below(3))});
  auto expected = aggregate_annotations(records);
  for (int trial = 0; trial < 10; ++trial) {
    rng.shuffle(records);
    CHECK(aggregate_annotations(records) == expected);
  }
}

TEST_CASE("stratified_split hits exact per-class proportions on the 60/40 fixture") {
  auto ds = synthetic_dataset(60, 40);
  auto split = stratified_split(ds, 0.8, 42);
  CHECK(split.train.count(LabelClass::Irrelevant) == 48);
  CHECK(split.train.count(LabelClass::ProblemReport) == 32);
  CHECK(split.test.count(LabelClass::Irrelevant) == 12);
  CHECK(split.test.count(LabelClass::ProblemReport) == 8);
}

TEST_CASE("stratified_split is deterministic for a fixed seed") {
  auto ds = synthetic_dataset(30, 20);
  auto a = stratified_split(ds, 0.8, 7);
  auto b = stratified_split(ds, 0.8, 7);
  CHECK(ids_of(a.train) == ids_of(b.train));
  CHECK(ids_of(a.test) == ids_of(b.test));
}

TEST_CASE("stratified_split rejects classes with fewer than two members") {
  std::vector<FeedbackDocument> docs;
  for (size_t i = 0; i < 10; ++i) docs.push_back(doc("i" + std::to_string(i), LabelClass::Irrelevant));
  docs.push_back(doc("lonely", LabelClass::Inquiry));
  auto ds = LabeledDataset::from_documents(std::move(docs));
  CHECK_THROWS_WITH_AS(stratified_split(ds, 0.8, 1), doctest::Contains("inquiry"), InputError);
}

TEST_CASE("stratified_split partitions ids exactly") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    size_t a = 2 + rng.below(40), b = 2 + rng.below(40);
    auto ds = synthetic_dataset(a, b);
    double ratio = 0.25 + 0.5 * rng.real();
    auto split = stratified_split(ds, ratio, rng.next());
    auto train_ids = ids_of(split.train), test_ids = ids_of(split.test);
    std::set<std::string> both;
    std::set_intersection(train_ids.begin(), train_ids.end(), test_ids.begin(), test_ids.end(),
                          std::inserter(both, both.begin()));
    CHECK(both.empty());
    std::set<std::string> all = train_ids;
    all.insert(test_ids.begin(), test_ids.end());
    CHECK(all == ids_of(ds));
    // Per-class train share stays within one document of the ratio.
    for (LabelClass c : kLabelClasses) {
      if (ds.count(c) == 0) continue;
      double want = ratio * static_cast<double>(ds.count(c));
      CHECK(std::abs(static_cast<double>(split.train.count(c)) - want) <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("undersample_majority balances 90/10 to 10/10") {
  auto ds = synthetic_dataset(90, 10);
  auto balanced = undersample_majority(ds, LabelClass::ProblemReport, 3);
  CHECK(balanced.count(LabelClass::ProblemReport) == 10);
  CHECK(balanced.count(LabelClass::Irrelevant) == 10);
}

TEST_CASE("undersample_majority leaves balanced data unchanged") {
  auto ds = synthetic_dataset(10, 10);
  auto out = undersample_majority(ds, LabelClass::ProblemReport, 3);
  CHECK(ids_of(out) == ids_of(ds));
}

TEST_CASE("undersample_majority never fabricates documents") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto ds = synthetic_dataset(2 + rng.below(50), 2 + rng.below(50));
    auto out = undersample_majority(ds, LabelClass::ProblemReport, rng.next());
    auto in_ids = ids_of(ds), out_ids = ids_of(out);
    CHECK(std::includes(in_ids.begin(), in_ids.end(), out_ids.begin(), out_ids.end()));
    // Minority group untouched, majority trimmed to its size.
    size_t pos_before = ds.count(LabelClass::ProblemReport);
    size_t neg_before = ds.size() - pos_before;
    size_t minority = std::min(pos_before, neg_before);
    CHECK(out.count(LabelClass::ProblemReport) == std::min(pos_before, minority));
    CHECK(out.size() == 2 * minority);
    CHECK(out.recount() == out.class_counts);
  }
}

TEST_CASE("undersample_majority requires both groups non-empty") {
  auto ds = synthetic_dataset(10, 2);
  CHECK_THROWS_AS(undersample_majority(ds, LabelClass::Inquiry, 1), InputError);
}
