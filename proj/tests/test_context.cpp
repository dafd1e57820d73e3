#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "orchsim/context.hpp"

using namespace orchsim;

namespace {

std::string words(int n, const std::string& w = "w") {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += " ";
    out += w;
  }
  return out;
}

}  // namespace

TEST_CASE("entry classification is fixed by origin") {
  CHECK(classify_entry(EntryOrigin::ToolCall) == EntryKind::Critical);
  CHECK(classify_entry(EntryOrigin::StateChange) == EntryKind::Critical);
  CHECK(classify_entry(EntryOrigin::PlanUpdate) == EntryKind::Critical);
  CHECK(classify_entry(EntryOrigin::ErrorSignal) == EntryKind::Critical);
  CHECK(classify_entry(EntryOrigin::Observation) == EntryKind::Routine);
  CHECK(classify_entry(EntryOrigin::Reasoning) == EntryKind::Routine);

  auto e = make_entry(EntryOrigin::ToolCall, "opened sheet, ok", 3, "t1", "excel");
  CHECK(e.kind == EntryKind::Critical);
  CHECK(e.tokens == 4);  // opened / sheet / , / ok
  CHECK(e.cycle == 3);
}

TEST_CASE("window stays verbatim below the budget") {
  ContextWindow w(100);
  auto r1 = w.push(make_entry(EntryOrigin::Observation, words(40), 1));
  auto r2 = w.push(make_entry(EntryOrigin::ToolCall, words(40, "c"), 1));
  CHECK(!r1.summarized);
  CHECK(!r2.summarized);
  CHECK(w.total_tokens() == 80);
  CHECK(w.entries().size() == 2);
  CHECK(w.entries()[0].content == words(40));
}

TEST_CASE("stage 1 collapses routine entries and keeps criticals byte-exact") {
  ContextWindow w(200);
  std::vector<std::string> crit = {"tool edit a=1 ok", "error\ttab and\nnewline kept",
                                   words(60, "c")};
  w.push(make_entry(EntryOrigin::ToolCall, crit[0], 1, "t1"));
  w.push(make_entry(EntryOrigin::ErrorSignal, crit[1], 2, "t1"));
  w.push(make_entry(EntryOrigin::StateChange, crit[2], 2));
  w.push(make_entry(EntryOrigin::Reasoning, "thinking about t1 layout", 3, "t1"));
  w.push(make_entry(EntryOrigin::Observation, "grid excel r1 c2 v3 v4 v5 v6", 4, "", "excel"));
  CHECK(w.total_tokens() <= 200);

  auto rep = w.push(make_entry(EntryOrigin::Observation, words(120), 5));
  CHECK(rep.summarized);
  CHECK(rep.stage == 1);
  CHECK(rep.evicted_tokens > 0);
  CHECK(w.total_tokens() <= 200);

  auto after = w.critical_contents();
  REQUIRE(after.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(after[i] == crit[i]);

  // The summary is the single remaining routine entry.
  REQUIRE(w.entries().size() == 4);
  const auto& sum = w.entries().back();
  CHECK(sum.kind == EntryKind::Routine);
  CHECK(sum.content.rfind("summary cycles ", 0) == 0);
  CHECK(sum.content.find("done t1 c3") != std::string::npos);
  CHECK(sum.content.find("app excel grid excel r1 c2 v3 v4") != std::string::npos);
  REQUIRE(w.last_summary().has_value());
  CHECK(w.last_summary()->app_state.at("excel").rfind("grid excel", 0) == 0);
}

TEST_CASE("stage 2 drops application state lines when stage 1 does not fit") {
  ContextWindow w(200);
  w.push(make_entry(EntryOrigin::ToolCall, words(150, "c"), 1));
  for (int a = 1; a <= 5; ++a) {
    std::string app = "app" + std::to_string(a);
    w.push(make_entry(EntryOrigin::Observation, "grid " + app + " r1 c2 v3 v4 v5 v6", 2, "", app));
  }
  w.push(make_entry(EntryOrigin::Reasoning, "progress going well", 3, "t1"));
  CHECK(w.total_tokens() == 193);

  auto rep = w.push(make_entry(EntryOrigin::Observation, words(30), 4));
  CHECK(rep.summarized);
  CHECK(rep.stage == 2);
  CHECK(w.last_stage() == 2);
  CHECK(w.total_tokens() <= 200);

  REQUIRE(w.entries().size() == 2);
  const auto& sum = w.entries().back();
  CHECK(sum.content.find("done t1 c3") != std::string::npos);
  CHECK(sum.content.find("\napp ") == std::string::npos);
  // The record itself still carries the state for inspection.
  CHECK(w.last_summary()->app_state.size() == 5);
}

TEST_CASE("a summary that would not shrink the window degrades to nothing") {
  ContextWindow w(10);
  w.push(make_entry(EntryOrigin::ToolCall, words(9, "c"), 1));
  auto rep = w.push(make_entry(EntryOrigin::Observation, "small note", 1));
  CHECK(rep.summarized);
  CHECK(rep.evicted_tokens == 2);
  // "summary cycles 1-1" is 5 tokens, more than the 2 it would replace, so
  // the routine side is dropped outright.
  REQUIRE(w.entries().size() == 1);
  CHECK(w.entries()[0].kind == EntryKind::Critical);
  CHECK(w.total_tokens() == 9);
}

TEST_CASE("over-compression is an error, not silent loss") {
  ContextWindow w(20);
  try {
    w.push(make_entry(EntryOrigin::ErrorSignal, words(25, "c"), 1));
    FAIL("expected OverCompression");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::OverCompression);
  }
}

TEST_CASE("stabilize is idempotent once under budget") {
  ContextWindow w(100);
  w.push(make_entry(EntryOrigin::ToolCall, words(40, "c"), 1, "t1"));
  w.push(make_entry(EntryOrigin::Observation, words(80), 2, "t1"));
  CHECK(w.last_stage() == 1);
  auto snapshot = w.dump();
  auto rep = w.stabilize();
  CHECK(!rep.summarized);
  CHECK(w.dump() == snapshot);
}

TEST_CASE("re-summarizing carries progress and blocker lines forward") {
  ContextWindow w(60);
  w.push(make_entry(EntryOrigin::ToolCall, words(10, "c"), 1));
  w.push(make_entry(EntryOrigin::Reasoning, "working t1 step one", 3, "t1"));
  auto r1 = w.push(make_entry(EntryOrigin::Observation, words(50), 4));
  CHECK(r1.summarized);
  CHECK(w.entries().back().content.find("done t1 c3") != std::string::npos);

  w.push(make_entry(EntryOrigin::Reasoning, "working t2 fine", 7, "t2"));
  w.push(make_entry(EntryOrigin::Reasoning, "error timeout on save", 7, "t3"));
  auto r2 = w.push(make_entry(EntryOrigin::Observation, words(45), 8));
  CHECK(r2.summarized);
  const auto& sum = w.entries().back().content;
  CHECK(sum.find("done t1 c3") != std::string::npos);
  CHECK(sum.find("done t2 c7") != std::string::npos);
  CHECK(sum.find("block t3") != std::string::npos);
}

TEST_CASE("fuzzed pushes never lose critical bytes or exceed the budget") {
  Rng rng(2026);
  ContextWindow w(512);
  std::vector<std::string> crit;
  int compressions = 0, resets = 0;
  for (int i = 0; i < 3000; ++i) {
    const EntryOrigin origins[] = {EntryOrigin::ToolCall,    EntryOrigin::StateChange,
                                   EntryOrigin::PlanUpdate,  EntryOrigin::ErrorSignal,
                                   EntryOrigin::Observation, EntryOrigin::Reasoning};
    EntryOrigin origin = origins[rng.below(6)];
    int len = 1 + int(rng.below(40));
    std::string content = words(len, "x" + std::to_string(rng.below(5)));
    std::string task = rng.below(3) == 0 ? "t" + std::to_string(rng.below(4)) : "";
    std::string app = rng.below(4) == 0 ? "app" + std::to_string(rng.below(3)) : "";
    auto entry = make_entry(origin, content, i / 10, task, app);
    bool critical = entry.kind == EntryKind::Critical;
    try {
      auto rep = w.push(std::move(entry));
      if (critical) crit.push_back(content);
      if (rep.summarized) {
        ++compressions;
        CHECK((rep.stage == 1 || rep.stage == 2));
        CHECK(rep.evicted_tokens > 0);
      }
    } catch (const Error& e) {
      REQUIRE(e.code() == Errc::OverCompression);
      w.clear();
      crit.clear();
      ++resets;
      continue;
    }
    REQUIRE(w.total_tokens() <= 512);
    REQUIRE(w.critical_contents() == crit);
  }
  // The workload is heavy enough to exercise both paths.
  CHECK(compressions > 100);
  CHECK(resets > 0);
}
