#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "orchsim/memory.hpp"

using namespace orchsim;
using Catch::Approx;

namespace {

MemoryRecord rec(std::string content, bool important, SimMinute at,
                 RecordKind kind = RecordKind::Note, std::string app = {}) {
  MemoryRecord r;
  r.kind = kind;
  r.important = important;
  r.app_tag = std::move(app);
  r.created_at = r.last_accessed = at;
  r.content = std::move(content);
  return r;
}

}  // namespace

TEST_CASE("embedding is an order-free bag of lowercased tokens") {
  CHECK(is_zero(embed("")));
  CHECK(is_zero(embed("   \t\n")));
  CHECK(!is_zero(embed("hello")));

  auto a = embed("hello world");
  auto b = embed("world hello");
  CHECK(a == b);
  CHECK(embed("Hello WORLD") == a);
  CHECK(cosine(a, a) == Approx(1.0));
  CHECK(cosine(embed(""), a) == 0.0);

  // Unit length once any token lands.
  double norm = 0;
  for (float x : a) norm += double(x) * x;
  CHECK(norm == Approx(1.0));
}

TEST_CASE("cosine separates disjoint vocabularies and scores overlap") {
  // These four words hash to distinct buckets; the test guards that premise
  // so a hash change cannot silently weaken it.
  std::vector<std::string> vocab = {"alpha", "beta", "gamma", "delta"};
  std::set<std::uint64_t> buckets;
  for (const auto& v : vocab) buckets.insert(fnv1a(v) % kEmbeddingBuckets);
  REQUIRE(buckets.size() == 4);

  CHECK(cosine(embed("alpha beta"), embed("gamma delta")) == Approx(0.0));
  // "alpha beta" vs "alpha gamma": one of two unit-mass buckets shared.
  CHECK(cosine(embed("alpha beta"), embed("alpha gamma")) == Approx(0.5));
}

TEST_CASE("retrieval scores recombine recency, importance, and similarity") {
  SemanticStore store;
  auto id_a = store.store(rec("quarterly budget totals", false, 0));
  auto id_b = store.store(rec("vacation photos", true, 0));
  auto id_c = store.store(rec("budget review notes", false, 180));

  RetrievalQuery q;
  q.text = "budget totals";
  q.now = 200;
  auto got = store.retrieve(q);
  REQUIRE(got.size() == 3);

  // Recompute each score from the frozen formula with half-life 100 minutes.
  for (const auto& s : got) {
    double age = s.record_id == id_c ? 20.0 : 200.0;
    double recency = std::exp(-age / 100.0);
    double importance = s.record_id == id_b ? 1.0 : 0.0;
    double sim = s.record_id == id_a ? cosine(embed("budget totals"), embed("quarterly budget totals"))
               : s.record_id == id_b ? cosine(embed("budget totals"), embed("vacation photos"))
                                     : cosine(embed("budget totals"), embed("budget review notes"));
    CHECK(s.recency == Approx(recency));
    CHECK(s.similarity == Approx(sim));
    CHECK(s.score == Approx(0.4 * recency + 0.4 * importance + 0.2 * sim));
  }
  // Importance floor (0.4) puts b first; c rides recency past a's similarity.
  CHECK(got[0].record_id == id_b);
  CHECK(got[1].record_id == id_c);
  CHECK(got[2].record_id == id_a);
}

TEST_CASE("retrieval truncates to k and breaks ties by id") {
  SemanticStore store;
  for (int i = 0; i < 8; ++i) store.store(rec("same words here", false, 0));
  RetrievalQuery q;
  q.text = "unrelated query";
  q.now = 50;
  q.k = 5;
  auto got = store.retrieve(q);
  REQUIRE(got.size() == 5);
  for (int i = 0; i < 5; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "m%06d", i);
    CHECK(got[i].record_id == buf);
  }
}

TEST_CASE("retrieval filters by kind and app tag") {
  SemanticStore store;
  store.store(rec("excel sheet work", false, 0, RecordKind::ActionSummary, "excel"));
  store.store(rec("word memo work", false, 0, RecordKind::ActionSummary, "word"));
  store.store(rec("day plan", false, 0, RecordKind::DailyPlan));

  RetrievalQuery q;
  q.text = "work";
  q.now = 10;
  q.kind = RecordKind::ActionSummary;
  CHECK(store.retrieve(q).size() == 2);
  q.app_tag = "excel";
  auto got = store.retrieve(q);
  REQUIRE(got.size() == 1);
  CHECK(store.get(got[0].record_id).app_tag == "excel");
  q.kind = RecordKind::MonthlyPlan;
  q.app_tag.reset();
  CHECK(store.retrieve(q).empty());
}

TEST_CASE("retrieval refreshes last_accessed on what it returns") {
  SemanticStore store;
  auto id = store.store(rec("note", false, 0));
  RetrievalQuery q;
  q.text = "note";
  q.now = 300;
  auto first = store.retrieve(q);
  CHECK(first[0].recency == Approx(std::exp(-3.0)));
  CHECK(store.get(id).last_accessed == 300);
  q.now = 310;
  auto second = store.retrieve(q);
  CHECK(second[0].recency == Approx(std::exp(-0.1)));
}

TEST_CASE("day consolidation writes one summary per task plus a reflection") {
  SemanticStore store;
  std::vector<DayOutcome> outcomes = {
      {"excel-01", "excel", true, 1, 12},
      {"excel-02", "excel", true, 2, 40},
      {"word-01", "word", true, 1, 9},
      {"ppt-01", "ppt", false, 3, 90},
  };
  auto created = consolidate_day(store, 4, outcomes, 5 * kMinutesPerDay);
  REQUIRE(created.size() == 5);
  CHECK(store.size() == 5);

  const auto& ok = store.get(created[0]);
  CHECK(ok.kind == RecordKind::ActionSummary);
  CHECK(!ok.important);
  CHECK(ok.task_tag == "excel-01");
  CHECK(ok.app_tag == "excel");
  CHECK(ok.content.find("completed") != std::string::npos);

  const auto& bad = store.get(created[3]);
  CHECK(bad.important);
  CHECK(bad.content.find("skipped") != std::string::npos);

  const auto& refl = store.get(created[4]);
  CHECK(refl.kind == RecordKind::Reflection);
  CHECK(refl.content.find("day 4 reflection") != std::string::npos);
  CHECK(refl.content.find("completed 3 skipped 1") != std::string::npos);
  CHECK(refl.content.find("skipped_ids ppt-01") != std::string::npos);
}

TEST_CASE("the append log replays to an identical store") {
  SemanticStore store;
  store.store(rec("tabs\tand\nnewlines survive", true, 10, RecordKind::Note, "excel"));
  store.store(rec("second record", false, 20));
  RetrievalQuery q;
  q.text = "record";
  q.now = 99;
  store.retrieve(q);  // access updates append more log lines

  auto copy = SemanticStore::replay_log(store.log());
  CHECK(copy.size() == store.size());
  for (const auto& id : store.ids()) {
    const auto& a = store.get(id);
    const auto& b = copy.get(id);
    CHECK(a.content == b.content);
    CHECK(a.kind == b.kind);
    CHECK(a.important == b.important);
    CHECK(a.task_tag == b.task_tag);
    CHECK(a.app_tag == b.app_tag);
    CHECK(a.created_at == b.created_at);
    CHECK(a.last_accessed == b.last_accessed);
  }
  CHECK(copy.log() == store.log());

  // New ids continue past the replayed sequence instead of colliding.
  MemoryRecord extra;
  extra.content = "post-replay";
  auto id = copy.store(std::move(extra));
  CHECK(id == "m000002");
}

TEST_CASE("by_kind and ids enumerate deterministically") {
  SemanticStore store;
  store.store(rec("a", false, 0, RecordKind::Note));
  store.store(rec("b", false, 0, RecordKind::Reflection));
  store.store(rec("c", false, 0, RecordKind::Note));
  CHECK(store.ids() == std::vector<std::string>{"m000000", "m000001", "m000002"});
  CHECK(store.by_kind(RecordKind::Note).size() == 2);
  CHECK(store.by_kind(RecordKind::MonthlyPlan).empty());
  CHECK_THROWS_AS(store.get("nope"), Error);
}
